use rand::Rng;
use taskbench::model::InputModality;

pub const FOUR: [&str; 4] = ["Touch", "Gesture", "Speech", "Pen"];

#[derive(Debug, Clone)]
pub struct Row {
    pub gender: &'static str,
    pub expertise: &'static str,
    pub robotics: &'static str,
    pub teachpad: &'static str,
    pub object: [u8; 4],
    pub constraints: [u8; 2],
    pub minutes: u32,
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut s = String::from(
        "id,age,gender,expertise,robotics,teachpad,exp_time,\
         xp_object.Touch,xp_object.Gesture,xp_object.Speech,xp_object.Pen,\
         xp_constraints.Touch,xp_constraints.Speech\n",
    );
    for (i, r) in rows.iter().enumerate() {
        s += &format!(
            "r{i},30,{},{},{},{},{},{},{},{},{},{},{}\n",
            r.gender,
            r.expertise,
            r.robotics,
            r.teachpad,
            r.minutes,
            r.object[0],
            r.object[1],
            r.object[2],
            r.object[3],
            r.constraints[0],
            r.constraints[1]
        );
    }
    s
}

pub fn in_segment(r: &Row, seg: &str) -> bool {
    match seg {
        "all" => true,
        "gender=female" => r.gender == "female",
        "gender=male" => r.gender == "male",
        "expertise=expert" => r.expertise == "Expert",
        "expertise=non-expert" => r.expertise != "Expert",
        "robotics=a-lot" => r.robotics == "ALot",
        "robotics=rest" => r.robotics != "ALot",
        "teachpad=known" => r.teachpad != "No",
        "teachpad=no" => r.teachpad == "No",
        _ => unreachable!(),
    }
}

/// Mean and sd from raw sums (a different formula from the library).
pub fn oracle_stats(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let sum: f64 = xs.iter().sum();
    let sq: f64 = xs.iter().map(|x| x * x).sum();
    let mean = sum / n;
    let sd = (xs.len() > 1).then(|| ((sq - sum * sum / n) / (n - 1.0)).max(0.0).sqrt());
    (mean, sd)
}

/// Position of each modality: the number of others with a strictly smaller
/// mean, plus earlier-enumerated ones with an equal mean.
pub fn oracle_ordering(means: &[(InputModality, f64)]) -> Vec<InputModality> {
    let mut slots = vec![None; means.len()];
    for (i, (m, x)) in means.iter().enumerate() {
        let pos = means
            .iter()
            .enumerate()
            .filter(|(j, (_, y))| *y < *x || (*y == *x && *j < i))
            .count();
        slots[pos] = Some(*m);
    }
    slots.into_iter().map(Option::unwrap).collect()
}

pub const SEGMENTS: [&str; 9] = [
    "all",
    "gender=female",
    "gender=male",
    "expertise=expert",
    "expertise=non-expert",
    "robotics=a-lot",
    "robotics=rest",
    "teachpad=known",
    "teachpad=no",
];


pub fn random_row(rng: &mut impl Rng) -> Row {
    use rand::seq::SliceRandom;
    let mut object = [1, 2, 3, 4];
    object.shuffle(rng);
    let mut constraints = [1, 2];
    constraints.shuffle(rng);
    Row {
        gender: ["female", "male"][rng.gen_range(0..2)],
        expertise: ["Beginner", "Basic", "Advanced", "Expert"][rng.gen_range(0..4)],
        robotics: ["NotMuch", "Hobby", "ALot"][rng.gen_range(0..3)],
        teachpad: ["No", "Know", "Used"][rng.gen_range(0..3)],
        object,
        constraints,
        minutes: rng.gen_range(1..700),
    }
}
