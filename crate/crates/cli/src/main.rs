use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

use pullbound_cli::experiments::output_path;
use pullbound_cli::{registry, CliError, Experiment, Options, Outcome};

fn command() -> Command {
    let common = [
        Arg::new("config")
            .long("config")
            .value_name("PATH")
            .required(true)
            .value_parser(value_parser!(PathBuf))
            .help("TOML experiment config"),
        Arg::new("out")
            .long("out")
            .value_name("PATH")
            .value_parser(value_parser!(PathBuf))
            .help("output path (overrides `output` in the config)"),
        Arg::new("seed")
            .long("seed")
            .value_name("U64")
            .value_parser(value_parser!(u64))
            .help("master seed (overrides `seed` in the config)"),
        Arg::new("workers")
            .long("workers")
            .value_name("N")
            .value_parser(value_parser!(usize))
            .help("worker threads; results do not depend on this"),
        Arg::new("force")
            .long("force")
            .action(ArgAction::SetTrue)
            .help("run even when the dominance check fails"),
    ];
    let mut cmd = Command::new("pullbound")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Containment-probability experiments for SDEs with pull-dominated drifts")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for e in registry().iter() {
        cmd = cmd.subcommand(Command::new(e.name()).about(e.about()).args(common.clone()));
    }
    cmd
}

fn sibling(primary: &Path, suffix: &str) -> PathBuf {
    let stem = primary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    primary.with_file_name(format!("{stem}.{suffix}"))
}

fn write_outcome(primary: &Path, outcome: &Outcome) -> Result<(), CliError> {
    for a in &outcome.artifacts {
        let path = match a.suffix {
            None => primary.to_path_buf(),
            Some(s) => sibling(primary, s),
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, &a.bytes)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn execute(experiment: &dyn Experiment, args: &ArgMatches) -> Result<(), CliError> {
    let config_path: &PathBuf = args.get_one("config").expect("required");
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let out = match args.get_one::<PathBuf>("out") {
        Some(p) => p.clone(),
        None => output_path(&text)?
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(experiment.default_output())),
    };
    let options = Options {
        seed: args.get_one::<u64>("seed").copied(),
        force: args.get_flag("force"),
    };
    let run = || experiment.run(&text, options);
    let outcome = match args.get_one::<usize>("workers").copied() {
        Some(0) => return Err(CliError::Config("`--workers` must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?
            .install(run)?,
        None => run()?,
    };
    write_outcome(&out, &outcome)?;
    match outcome.refusal {
        Some(reason) => Err(CliError::Refused(reason)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (name, args) = matches.subcommand().expect("subcommand is required");
    let reg = registry();
    let experiment = reg.get(name).expect("subcommands come from the registry");
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pullbound {name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
