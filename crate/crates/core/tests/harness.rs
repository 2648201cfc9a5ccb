use std::fs;
use std::path::Path;
use std::process::Command;

use hte_bandit::domain::{SeededRng, Stream};
use hte_bandit::env::{unit_sphere, Environment, EnvironmentSpec, Scenario};
use hte_bandit::harness::csv::{COMPARE_HEADER, CURVE_HEADER, RUN_HEADER};
use hte_bandit::harness::{
    algorithm_variants, check_paired, compare, comparison_rows, execute, run_experiment, RunConfig,
};
use hte_bandit::parallel::Execution;
use hte_bandit::policy::Algorithm;
use hte_bandit::Error;

fn small_config(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.environment.d = 4;
    cfg.environment.horizon = 300;
    cfg.seeds = vec![1, 2, 3];
    cfg.output_dir = dir.to_path_buf();
    cfg
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        // config.txt records the output directory itself.
        .filter(|p| p.is_file() && p.file_name().unwrap() != "config.txt")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn csv_headers_are_stable() {
    assert_eq!(
        RUN_HEADER,
        "t,epoch,safe,gamma,action,propensity,reward,expected_regret,cum_expected_regret"
    );
    assert_eq!(CURVE_HEADER, "t,mean_cum_regret,std_cum_regret");
    assert_eq!(
        COMPARE_HEADER,
        "algorithm,final_mean_regret,final_std_regret,ratio_to_baseline"
    );

    let dir = tempfile::tempdir().unwrap();
    let exp = run_experiment(&small_config(dir.path())).unwrap();
    let run = fs::read_to_string(dir.path().join("run_2.csv")).unwrap();
    let mut lines = run.lines();
    assert_eq!(lines.next(), Some(RUN_HEADER));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 9);
    assert_eq!(first[0], "1");
    assert_eq!(first[1], "1");
    assert_eq!(first[2], "1");
    // Actions are written one-based.
    let action: usize = first[4].parse().unwrap();
    assert_eq!(action, exp.runs[1].rounds[0].action + 1);
    assert_eq!(run.lines().count(), 301);
    let curve = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some(CURVE_HEADER));
    assert_eq!(curve.lines().count(), 301);
    let svg = fs::read_to_string(dir.path().join("curve.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn zero_horizon_writes_header_only_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.environment.horizon = 0;
    run_experiment(&cfg).unwrap();
    assert_eq!(
        fs::read_to_string(dir.path().join("run_1.csv")).unwrap(),
        format!("{RUN_HEADER}\n")
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("curve.csv")).unwrap(),
        format!("{CURVE_HEADER}\n")
    );
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let mut cfg = small_config(a.path());
    cfg.algorithm = Algorithm::ModHteIgw;
    run_experiment(&cfg).unwrap();
    cfg.output_dir = b.path().to_path_buf();
    run_experiment(&cfg).unwrap();
    cfg.output_dir = c.path().to_path_buf();
    cfg.execution = Execution::Sequential;
    run_experiment(&cfg).unwrap();
    let files = read_dir_sorted(a.path());
    assert_eq!(files.len(), 3 * 2 + 2);
    assert_eq!(files, read_dir_sorted(b.path()));
    assert_eq!(files, read_dir_sorted(c.path()));
}

#[test]
fn uniform_regret_slope_matches_monte_carlo_gap() {
    let seed = 6;
    let mut cfg = RunConfig {
        algorithm: Algorithm::Uniform,
        ..RunConfig::default()
    };
    cfg.environment.d = 5;
    cfg.environment.horizon = 20_000;
    cfg.seeds = vec![seed];
    let exp = execute(&cfg).unwrap();
    let slope = exp.curve.final_mean() / 20_000.0;

    let mut spec: EnvironmentSpec = cfg.environment.clone();
    spec.seed = seed;
    let env = Environment::build(spec).unwrap();
    let mut rng = SeededRng::new(99, Stream::Aux(0)).rng();
    let draws = 200_000;
    let gap: f64 = (0..draws)
        .map(|_| {
            let f = env.mean_rewards(1, &unit_sphere(5, &mut rng));
            let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            max - f.iter().sum::<f64>() / f.len() as f64
        })
        .sum::<f64>()
        / draws as f64;
    assert!((slope - gap).abs() <= 0.05 * gap, "slope {slope}, gap {gap}");
    assert_eq!(env.spec().scenario, Scenario::LinLin);
}

#[test]
fn aggregate_mean_is_the_mean_of_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let exp = execute(&small_config(dir.path())).unwrap();
    for t in 0..exp.curve.horizon() {
        let direct = exp.runs.iter().map(|r| r.rounds[t].cum_expected_regret).sum::<f64>() / 3.0;
        assert!((exp.curve.mean[t] - direct).abs() <= 1e-9);
    }
    for run in &exp.runs {
        assert!(run
            .rounds
            .windows(2)
            .all(|w| w[1].cum_expected_regret >= w[0].cum_expected_regret));
    }
}

#[test]
fn comparing_an_algorithm_with_itself_gives_unit_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let base = small_config(dir.path());
    let configs = algorithm_variants(&base, &[Algorithm::HteIgw, Algorithm::HteIgw, Algorithm::Uniform]);
    let exps = compare(&configs, dir.path()).unwrap();
    let rows = comparison_rows(&exps);
    assert_eq!(rows[0].3, 1.0);
    assert_eq!(rows[1].3, 1.0);
    assert!(rows[2].3 > 0.0);
    let csv = fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(COMPARE_HEADER));
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.path().join("compare.svg").exists());
    assert!(dir.path().join("uniform").join("run_1.csv").exists());
}

#[test]
fn mismatched_environments_are_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_config(dir.path());
    let mut b = a.clone();
    b.environment.scenario = Scenario::StepLin;
    assert!(matches!(check_paired(&[a.clone(), b]), Err(Error::Config(_))));
    let mut c = a.clone();
    c.seeds = vec![1, 2];
    assert!(matches!(compare(&[a, c], dir.path()), Err(Error::Config(_))));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = small_config(&blocker.join("out"));
    assert!(matches!(run_experiment(&cfg), Err(Error::Io(_))));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hte-bandit"))
}

const CLI_CONFIG: &str = "\
[environment]
scenario = lin_const
d = 3
horizon = 200

[run]
algorithm = mod_hte_igw
seeds = 1,2
";

#[test]
fn cli_run_and_compare_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.conf");
    fs::write(&config, CLI_CONFIG).unwrap();
    let out = dir.path().join("out");
    let set = format!("run.output={}", out.display());
    let status = cli()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--set", &set])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    assert!(out.join("run_2.csv").exists());
    assert!(out.join("config.txt").exists());

    let status = cli()
        .args(["compare", "--config"])
        .arg(&config)
        .args(["--algos", "mod_hte_igw,mod_igw", "--set", &set])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    assert!(out.join("compare.csv").exists());
    assert!(out.join("mod_igw").join("curve.csv").exists());
}

#[test]
fn cli_config_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.conf");
    fs::write(&config, CLI_CONFIG).unwrap();
    let missing = dir.path().join("missing.conf");
    let code = |args: &[&str], path: &Path| {
        cli()
            .args(&args[..2])
            .arg(path)
            .args(&args[2..])
            .output()
            .unwrap()
            .status
            .code()
    };

    assert_eq!(code(&["run", "--config"], &missing), Some(2));
    assert_eq!(code(&["run", "--config", "--set", "run.delta=2"], &config), Some(2));
    assert_eq!(
        code(&["run", "--config", "--set", "environment.colour=red"], &config),
        Some(2)
    );
    assert_eq!(
        code(&["compare", "--config", "--algos", "hte_igw,greedy"], &config),
        Some(2)
    );
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let set = format!("run.output={}", blocker.join("out").display());
    assert_eq!(code(&["run", "--config", "--set", &set], &config), Some(1));
}

#[test]
fn cli_validate_passes() {
    let out = cli().arg("validate").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{text}");
}
