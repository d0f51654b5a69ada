//! Assembly pose from a small constraint fragment: one concentric pair fixes
//! rotation and the radial position, an optional distance or collar contact
//! fixes the axial position.

use crate::geometry::{align_axes, Axis, Pose, Scalar, Vector3};
use crate::model::{Constraint, FeatureRef, ObjectModel};
use crate::Pose6D;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("constraints outside the supported fragment: {0}")]
    UnsolvableConstraints(String),
    #[error("feature {0} has a degenerate axis")]
    DegenerateFeature(String),
    #[error("unknown feature {0}")]
    UnknownFeature(String),
}

/// Axial condition between two reference points measured along the fixed
/// axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialCondition<T> {
    pub moving_point: Vector3<T>,
    pub fixed_point: Vector3<T>,
    pub distance: T,
}

/// Pose placing `moving` coaxially on `fixed`.
///
/// Without an axial condition the moving axis' reference point lands on the
/// fixed one. With a condition, the shift `s` along the fixed direction
/// solves `dot(R(q_a - p_a) + p_b - q_b, d_b) + s = distance`.
pub fn solve_coaxial<T: Scalar>(
    moving: &Axis<T>,
    fixed: &Axis<T>,
    axial: Option<&AxialCondition<T>>,
) -> Option<Pose<T>> {
    let dir = fixed.direction.normalized()?;
    moving.direction.normalized()?;
    let offset = match axial {
        None => T::zero(),
        Some(c) => {
            let rotation = crate::geometry::Quat::rotation_between(&moving.direction, &dir)?;
            let lever = rotation.rotate(&(c.moving_point - moving.point));
            c.distance - (lever + fixed.point - c.fixed_point).dot(&dir)
        }
    };
    align_axes(moving, fixed, offset)
}

fn resolve<'m>(
    f: &FeatureRef,
    model: &'m ObjectModel,
) -> Result<&'m crate::model::CylinderFeature, SolveError> {
    model
        .features
        .get(&f.feature)
        .ok_or_else(|| SolveError::UnknownFeature(f.to_string()))
}

/// Orders a constraint's feature pair as (feature on `a`, feature on `b`).
fn split<'c>(
    x: &'c FeatureRef,
    y: &'c FeatureRef,
    a: &ObjectModel,
    b: &ObjectModel,
) -> Result<(&'c FeatureRef, &'c FeatureRef), SolveError> {
    if x.object == a.id && y.object == b.id {
        Ok((x, y))
    } else if y.object == a.id && x.object == b.id {
        Ok((y, x))
    } else {
        let stray = if x.object != a.id && x.object != b.id { x } else { y };
        Err(SolveError::UnknownFeature(stray.to_string()))
    }
}

/// Pose of `a` in the frame of `b` satisfying `constraints`.
pub fn solve_assembly_pose(
    a: &ObjectModel,
    b: &ObjectModel,
    constraints: &[Constraint],
) -> Result<Pose6D, SolveError> {
    let mut concentric = Vec::new();
    let mut axial = Vec::new();
    for c in constraints {
        let (x, y) = c.features();
        let pair = split(x, y, a, b)?;
        match c {
            Constraint::Concentric { .. } => concentric.push(pair),
            Constraint::Distance { mm, .. } => axial.push((pair, mm / 1000.0)),
            Constraint::AgainstCollar { .. } => axial.push((pair, 0.0)),
            Constraint::Coplanar { .. } => {
                return Err(SolveError::UnsolvableConstraints(
                    "coplanar constraints are not supported".into(),
                ))
            }
        }
    }
    if concentric.len() != 1 {
        return Err(SolveError::UnsolvableConstraints(format!(
            "need exactly one concentric constraint, got {}",
            concentric.len()
        )));
    }
    if axial.len() > 1 {
        return Err(SolveError::UnsolvableConstraints(format!(
            "at most one distance or collar constraint, got {}",
            axial.len()
        )));
    }

    let (fa, fb) = concentric[0];
    let moving = resolve(fa, a)?;
    let fixed = resolve(fb, b)?;
    for (r, f) in [(fa, moving), (fb, fixed)] {
        if f.direction.normalized().is_none() {
            return Err(SolveError::DegenerateFeature(r.to_string()));
        }
    }
    let condition = match axial.first() {
        None => None,
        Some(&((qa, qb), distance)) => Some(AxialCondition {
            moving_point: resolve(qa, a)?.point,
            fixed_point: resolve(qb, b)?.point,
            distance,
        }),
    };
    solve_coaxial(&moving.axis(), &fixed.axis(), condition.as_ref())
        .ok_or_else(|| SolveError::DegenerateFeature(fa.to_string()))
}
