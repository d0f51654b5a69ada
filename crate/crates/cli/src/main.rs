mod commands;
mod serve;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use taskbench::model::DataKind;

#[derive(Parser)]
#[command(name = "taskbench", version, about = "Task-based robot programming workbench")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CellArg {
    /// Cell configuration; models and tables are read from its directory.
    #[arg(long, env = "TASKBENCH_CELL")]
    cell: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Cell configuration files.
    #[command(subcommand)]
    Cell(CellCommand),
    /// Knowledge base queries.
    #[command(subcommand)]
    Kb(KbCommand),
    /// Check, expand or run a process file.
    #[command(subcommand)]
    Process(ProcessCommand),
    /// Serve the engine over the websocket bridge.
    Serve {
        #[command(flatten)]
        cell: CellArg,
        /// 0 picks a free port; the bound address is printed on stdout.
        #[arg(long, default_value_t = 9090)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Process started by `engine.start_session` when none is given.
        #[arg(long)]
        process: Option<PathBuf>,
    },
    /// Questionnaire analysis.
    #[command(subcommand)]
    Study(StudyCommand),
}

#[derive(Subcommand)]
enum CellCommand {
    Validate { path: PathBuf },
}

#[derive(Subcommand)]
enum KbCommand {
    /// Modalities for a data type, best first.
    Modalities {
        #[command(flatten)]
        cell: CellArg,
        #[arg(long)]
        datatype: DataKind,
        /// Restrict to one catalog parameter (needs --param).
        #[arg(long, requires = "param")]
        task: Option<String>,
        #[arg(long, requires = "task")]
        param: Option<String>,
    },
}

#[derive(Subcommand)]
enum ProcessCommand {
    Validate {
        process: PathBuf,
        #[command(flatten)]
        cell: CellArg,
    },
    Expand {
        process: PathBuf,
        #[command(flatten)]
        cell: CellArg,
    },
    /// Runs a fully parameterized process; human steps are confirmed
    /// automatically.
    Run {
        process: PathBuf,
        #[command(flatten)]
        cell: CellArg,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StudyCommand {
    Analyze {
        csv: PathBuf,
        #[arg(long)]
        question: String,
        /// Only rows in this segment, e.g. gender=female.
        #[arg(long, conflicts_with = "compare")]
        segment: Option<String>,
        /// Both sides of a dimension: gender, expertise, robotics, teachpad.
        #[arg(long)]
        compare: Option<String>,
    },
    /// Writes the preference table derived from the rank questions.
    ExportKb {
        csv: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Writes one line to stdout and flushes it. A closed pipe ends the
/// process quietly, as `taskbench ... | head` expects.
pub fn emit(line: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{line}").and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write output: {e}");
        std::process::exit(1);
    }
}

#[macro_export]
macro_rules! out {
    ($($arg:tt)*) => {
        $crate::emit(&format!($($arg)*))
    };
}

/// Failure of a command; the variant decides the exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input files.
    Usage(String),
    /// Input was read but is invalid, or the run failed.
    Invalid(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invalid(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let json = cli.json;
    let result = match cli.command {
        Command::Cell(CellCommand::Validate { path }) => commands::cell_validate(&path, json),
        Command::Kb(KbCommand::Modalities {
            cell,
            datatype,
            task,
            param,
        }) => commands::kb_modalities(&cell.cell, datatype, task.zip(param), json),
        Command::Process(cmd) => match cmd {
            ProcessCommand::Validate { process, cell } => commands::process_validate(&process, &cell.cell, json),
            ProcessCommand::Expand { process, cell } => commands::process_expand(&process, &cell.cell, json),
            ProcessCommand::Run { process, cell, trace } => {
                commands::process_run(&process, &cell.cell, trace.as_deref(), json)
            }
        },
        Command::Serve {
            cell,
            port,
            host,
            process,
        } => serve::run(&cell.cell, &host, port, process.as_deref()),
        Command::Study(cmd) => match cmd {
            StudyCommand::Analyze {
                csv,
                question,
                segment,
                compare,
            } => commands::study_analyze(&csv, &question, segment.as_deref(), compare.as_deref(), json),
            StudyCommand::ExportKb { csv, output } => commands::study_export(&csv, output.as_deref()),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Invalid(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
