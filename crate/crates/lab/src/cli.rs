//! The `nematic-lab` command line. Output goes to caller-supplied writers so
//! the binary is a thin wrapper and the commands can be driven in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::config::{resolve, tokenize, Entry, KEYS};
use crate::{epsilon_sweep, refinement_study, run_scenario, LabError, PRESETS};

const DEFAULT_SWEEP: &str = "0.2,0.1,0.05";

/// Defaults for `refine`, applied after the preset and before the file.
const REFINE_DEFAULTS: [(&str, &str); 6] = [
    ("profile", "smooth"),
    ("x_min", "-4.5"),
    ("x_max", "4.5"),
    ("nx", "2049"),
    ("t_end", "0.5"),
    ("transport", "upwind1"),
];

fn with_config_args(cmd: Command) -> Command {
    let cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .short('c')
            .value_name("FILE")
            .help("Configuration file"),
    );
    KEYS.iter().fold(cmd, |cmd, (key, _)| {
        let long: &'static str = Box::leak(key.replace('_', "-").into_boxed_str());
        cmd.arg(
            Arg::new(*key)
                .long(long)
                .value_name("VALUE")
                .action(ArgAction::Set)
                .allow_negative_numbers(true)
                .help(format!("Override `{key}`")),
        )
    })
}

fn cli() -> Command {
    Command::new("nematic-lab")
        .about("Poiseuille-flow nematic liquid crystal simulations: cusp formation, energy decay, J bounds")
        .subcommand_required(true)
        .subcommand(with_config_args(Command::new("run").about("Run one scenario and write its artifacts")))
        .subcommand(with_config_args(
            Command::new("sweep").about("Run an epsilon sweep").arg(
                Arg::new("eps")
                    .long("eps")
                    .value_name("LIST")
                    .default_value(DEFAULT_SWEEP)
                    .help("Comma-separated, strictly decreasing epsilon values"),
            ),
        ))
        .subcommand(with_config_args(
            Command::new("refine").about("Grid refinement study on smooth data").arg(
                Arg::new("levels")
                    .long("levels")
                    .value_name("N")
                    .default_value("3")
                    .value_parser(clap::value_parser!(usize)),
            ),
        ))
        .subcommand(with_config_args(Command::new("validate").about("Check the material relations only")))
        .subcommand(Command::new("presets").about("List scenario presets"))
}

fn entries(m: &ArgMatches, defaults: &[(&str, &str)]) -> Result<Vec<Entry>, LabError> {
    let mut out: Vec<Entry> = Vec::new();
    let mut file_entries = match m.get_one::<String>("config") {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| LabError::Io {
                path: path.into(),
                source: e,
            })?;
            tokenize(&text)?
        }
        None => Vec::new(),
    };
    out.extend(defaults.iter().map(|(k, v)| Entry::flag(k, v)));
    out.append(&mut file_entries);
    for (key, _) in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            out.push(Entry::flag(key, v));
        }
    }
    Ok(out)
}

fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, LabError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return Ok(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match matches.subcommand() {
        Some(("run", m)) => {
            let cfg = resolve(&entries(m, &[])?)?;
            let (exec, status) = run_scenario(&cfg)?;
            let _ = write!(out, "{}", exec.result.report);
            if !exec.result.report.detected && cfg.expect == crate::Expectation::Blowup {
                let _ = writeln!(
                    err,
                    "warning: blowup was expected but no trigger fired before t_end"
                );
            }
            let _ = writeln!(err, "artifacts written to {}", cfg.output_dir);
            Ok(status.exit_code() as u8)
        }
        Some(("sweep", m)) => {
            let cfg = resolve(&entries(m, &[])?)?;
            let list = m.get_one::<String>("eps").expect("default");
            let eps = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| LabError::Precondition(format!("malformed epsilon list `{list}`")))?;
            let summary = epsilon_sweep(&cfg, &eps, Some(Path::new(&cfg.output_dir)))?;
            let _ = write!(out, "{}", summary.to_csv());
            Ok(0)
        }
        Some(("refine", m)) => {
            let cfg = resolve(&entries(m, &REFINE_DEFAULTS)?)?;
            let levels = *m.get_one::<usize>("levels").expect("default");
            let table = refinement_study(&cfg, levels, Some(Path::new(&cfg.output_dir)))?;
            let _ = write!(out, "{}", table.to_csv());
            if table.passed() {
                Ok(0)
            } else {
                Err(LabError::Unexpected(format!(
                    "observed order {} below {}",
                    table.min_order(),
                    crate::RefinementTable::MIN_ORDER
                )))
            }
        }
        Some(("validate", m)) => {
            let all = entries(m, &[("profile", "smooth")])?;
            let cfg = match resolve(&all) {
                Ok(cfg) => cfg,
                Err(LabError::Config { message, .. })
                    if message.starts_with("material violates") =>
                {
                    let _ = writeln!(out, "{message}");
                    return Ok(1);
                }
                Err(e) => return Err(e),
            };
            let report = cfg.material.validate();
            let bounds = cfg.material.default_bounds()?;
            let _ = writeln!(out, "ok = {}", report.ok());
            let _ = writeln!(out, "g_range = [{}, {}]", bounds.g_lower, bounds.g_upper);
            let _ = writeln!(out, "h_range = [{}, {}]", bounds.h_lower, bounds.h_upper);
            let _ = writeln!(out, "c_range = [{}, {}]", bounds.c_lower, bounds.c_upper);
            let _ = writeln!(out, "damping_margin = {}", bounds.damping_margin);
            let _ = writeln!(out, "damping_sup = {}", bounds.damping_sup);
            let _ = writeln!(
                out,
                "t_bound = {}",
                nematic_core::diagnostics::blowup_bound_t(&cfg.material)?
            );
            Ok(0)
        }
        Some(("presets", _)) => {
            for p in PRESETS {
                let _ = writeln!(
                    out,
                    "{:<15} expect={:<9} {}",
                    p.name,
                    p.expect.name(),
                    p.summary
                );
            }
            Ok(0)
        }
        _ => unreachable!("subcommand required"),
    }
}

/// Runs the command line on `args` (program name first) and returns the
/// process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match dispatch(args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use std::fs;
    use std::path::Path;

    use super::main_with;
    use crate::output::{INITIAL_HEADER, SNAPSHOT_HEADER, TIMESERIES_HEADER};
    use crate::{parse_config, RunConfig};

    struct Run {
        code: u8,
        out: String,
        err: String,
    }

    fn lab(args: &[&str]) -> Run {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("nematic-lab").chain(args.iter().copied());
        let code = main_with(argv, &mut out, &mut err);
        Run {
            code,
            out: String::from_utf8(out).unwrap(),
            err: String::from_utf8(err).unwrap(),
        }
    }

    /// A short constant-speed run on a coarse mesh.
    fn quick_run(dir: &Path) -> Run {
        lab(&[
            "run",
            "--preset",
            "constant-speed",
            "--nx",
            "1025",
            "--t-end",
            "0.1",
            "--snapshot-stride",
            "20",
            "--dir",
            dir.to_str().unwrap(),
        ])
    }

    fn first_line(path: &Path) -> String {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    }

    #[test]
    fn run_writes_all_artifacts() {
        let tmp = tempfile::tempdir().unwrap();
        let out = quick_run(tmp.path());
        assert_eq!(out.code, 0, "{}", out.err);
        let dir = tmp.path();
        assert_eq!(first_line(&dir.join("timeseries.csv")), TIMESERIES_HEADER);
        assert_eq!(first_line(&dir.join("initial_profile.csv")), INITIAL_HEADER);
        assert_eq!(first_line(&dir.join("snapshots/0000.csv")), SNAPSHOT_HEADER);
        let report = fs::read_to_string(dir.join("blowup_report.txt")).unwrap();
        assert!(report.contains("detected = false"), "{report}");
        let initial = fs::read_to_string(dir.join("initial_profile.csv")).unwrap();
        assert_eq!(initial.lines().count(), 1026);
    }

    #[test]
    fn resolved_config_round_trips() {
        let tmp = tempfile::tempdir().unwrap();
        assert_eq!(quick_run(tmp.path()).code, 0);
        let text = fs::read_to_string(tmp.path().join("resolved_config.txt")).unwrap();
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.grid.nx, 1025);
        assert_eq!(cfg.solver.t_end, 0.1);
        assert_eq!(cfg.to_text(), text);
        let preset = RunConfig::from_preset("constant-speed").unwrap();
        assert_eq!(cfg.material, preset.material);
        assert_eq!(cfg.amplitude, preset.amplitude);
    }

    #[test]
    fn identical_runs_give_identical_files() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(quick_run(a.path()).code, 0);
        assert_eq!(quick_run(b.path()).code, 0);
        for name in [
            "timeseries.csv",
            "initial_profile.csv",
            "blowup_report.txt",
            "snapshots/0001.csv",
        ] {
            assert_eq!(
                fs::read(a.path().join(name)).unwrap(),
                fs::read(b.path().join(name)).unwrap(),
                "{name} differs"
            );
        }
    }

    #[test]
    fn config_file_errors_name_the_line() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("bad.cfg");
        fs::write(&path, "preset = general\n\n[grid]\nnx = 1025\nbogus = 3\n").unwrap();
        let out = lab(&["run", "--config", path.to_str().unwrap()]);
        assert_eq!(out.code, 1);
        assert!(out.err.contains("line 5"), "{}", out.err);
    }

    #[test]
    fn bad_flag_value_names_the_flag() {
        let out = lab(&["run", "--preset", "general", "--epsilon", "-1"]);
        assert_eq!(out.code, 1);
        assert!(out.err.contains("--epsilon"), "{}", out.err);
    }

    #[test]
    fn sweep_needs_three_values() {
        let tmp = tempfile::tempdir().unwrap();
        let out = lab(&[
            "sweep",
            "--preset",
            "general",
            "--eps",
            "0.05",
            "--dir",
            tmp.path().to_str().unwrap(),
        ]);
        assert_eq!(out.code, 1);
        assert!(out.err.contains("at least 3"), "{}", out.err);
        let out = lab(&["sweep", "--preset", "general", "--eps", "0.05,0.1,0.2"]);
        assert_eq!(out.code, 1);
        assert!(out.err.contains("decreasing"), "{}", out.err);
    }

    #[test]
    fn refine_needs_three_levels() {
        let out = lab(&["refine", "--preset", "general", "--levels", "2"]);
        assert_eq!(out.code, 1);
        assert!(out.err.contains("at least 3 levels"), "{}", out.err);
    }

    #[test]
    fn validate_reports_parodi_violation() {
        let out = lab(&["validate", "--preset", "special", "--alpha6", "1"]);
        assert_eq!(out.code, 1);
        let text = &out.out;
        assert!(text.contains("parodi"), "{text}");

        let out = lab(&["validate", "--preset", "general"]);
        assert_eq!(out.code, 0);
        assert!(&out.out.contains("ok = true"));
    }

    #[test]
    fn presets_are_listed() {
        let out = lab(&["presets"]);
        assert_eq!(out.code, 0);
        let text = &out.out;
        for name in ["special", "general", "constant-speed"] {
            assert!(text.contains(name), "{text}");
        }
    }

    #[test]
    fn blowup_run_exits_with_two() {
        // coarse mesh: the gradient trigger fires almost at once
        let tmp = tempfile::tempdir().unwrap();
        let out = lab(&[
            "run",
            "--preset",
            "general",
            "--nx",
            "4097",
            "--dir",
            tmp.path().to_str().unwrap(),
        ]);
        assert_eq!(out.code, 2, "{}", out.err);
        let report = fs::read_to_string(tmp.path().join("blowup_report.txt")).unwrap();
        assert!(report.contains("detected = true"), "{report}");
    }
}
