use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orbifold_lab::group::GROUP_PRESETS;
use orbifold_lab::space::ACTION_PRESETS;
use orbifold_lab_cli::scenario::{BUNDLED, SPACE_TAGS};
use orbifold_lab_cli::{emit, load_scenario, report, run, CliError, Format, Stage, OUT_ENV};

#[derive(Parser)]
#[command(name = "orbifold-lab", version, about = "Sector algebras and spectral flows of finite group actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and list every problem found.
    Validate { file: PathBuf },
    /// Run the pipeline on a scenario.
    Run {
        file: PathBuf,
        /// Stages to run; dependencies are added automatically.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [StageArg::Sectors, StageArg::Spectra, StageArg::Flow, StageArg::Observables, StageArg::Toy])]
        stages: Vec<StageArg>,
        /// Output directory. Without it, and without $ORBIFOLD_LAB_OUT, JSON goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Built-in presets.
    Presets {
        #[command(subcommand)]
        what: PresetsCommand,
    },
}

#[derive(Subcommand)]
enum PresetsCommand {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Sectors,
    Spectra,
    Flow,
    Observables,
    Toy,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Self {
        match s {
            StageArg::Sectors => Stage::Sectors,
            StageArg::Spectra => Stage::Spectra,
            StageArg::Flow => Stage::Flow,
            StageArg::Observables => Stage::Observables,
            StageArg::Toy => Stage::Toy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Validate { file } => {
            let loaded = load_scenario(&file)?;
            println!(
                "ok: {} (group order {}, {} points)",
                loaded.scenario.name,
                loaded.group.order(),
                loaded.space.point_count()
            );
            Ok(())
        }
        Command::Run {
            file,
            stages,
            out,
            format,
        } => {
            let loaded = load_scenario(&file)?;
            let stages: Vec<Stage> = stages.into_iter().map(Stage::from).collect();
            let rep = run(&loaded, &stages)?;
            for n in &rep.notices {
                eprintln!("notice: {n}");
            }
            let dir = out.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from));
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            };
            match (dir, format) {
                (None, Format::Json) => {
                    let text = report::to_json(&rep)?;
                    std::io::stdout()
                        .write_all(text.as_bytes())
                        .map_err(|e| CliError::Io(format!("stdout: {e}")))
                }
                (dir, format) => {
                    let dir = dir.unwrap_or_else(|| PathBuf::from(format!("{}_csv", rep.scenario)));
                    for f in emit(&rep, format, &dir)? {
                        eprintln!("wrote {}", f.display());
                    }
                    Ok(())
                }
            }
        }
        Command::Presets {
            what: PresetsCommand::List,
        } => {
            println!("groups:    {}", GROUP_PRESETS.join(", "));
            println!("actions:   {}", ACTION_PRESETS.join(", "));
            println!("spaces:    {}", SPACE_TAGS.join(", "));
            let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
            println!("scenarios: {}", names.join(", "));
            Ok(())
        }
    }
}
