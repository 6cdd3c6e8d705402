//! Adapter tests against stub executables. The run against a real installation only happens
//! when `ENERGYPLUS_EXE` is set.

mod common;

use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::*;
use planforge_core::reporting::{HourlySeries, ZONE_TEMPERATURE};
use planforge_core::systems::SystemsSpec;
use planforge_idf::eplus::{
    parse_outputs, render_outputs, run_simulation, EplusError, LogSummary, RunConfig, RunSlots,
    SimulationOutput, METER_KEY,
};
use planforge_idf::IdfDocument;
use proptest::prelude::*;

const HEADER: &str =
    "Date/Time,Z-0-ROOM:Zone Mean Air Temperature [C](Hourly),Electricity:Facility [J](Hourly)";

/// A canned year of two columns with values that are awkward in binary.
fn canned_year() -> String {
    let mut text = format!("{HEADER}\n");
    let mut day = (1, 1);
    let month_days = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
    for h in 0..8760 {
        let hour = h % 24 + 1;
        text.push_str(&format!(
            " {:02}/{:02}  {:02}:00:00,{},{}\n",
            day.0,
            day.1,
            hour,
            20.0 + (h as f64 * 0.37).sin() * 3.1,
            h as f64 * 1.1e5 + 0.3
        ));
        if hour == 24 {
            day.1 += 1;
            if day.1 > month_days[day.0 - 1] {
                day = (day.0 + 1, 1);
            }
        }
    }
    text
}

struct Stub {
    dir: tempfile::TempDir,
    exe: PathBuf,
    weather: PathBuf,
}

impl Stub {
    /// A shell script standing in for the simulator; `$out` is the `-d` directory and `$here`
    /// the script's own, where fixtures live.
    fn new(body: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let exe = dir.path().join("energyplus");
        let script = format!(
            "#!/bin/sh\nhere=$(dirname \"$0\")\nout=.\nwhile [ $# -gt 0 ]; do\n  if [ \"$1\" = -d ]; then out=$2; shift; fi\n  shift\ndone\n{body}\n"
        );
        std::fs::write(&exe, script).unwrap();
        std::fs::set_permissions(&exe, std::fs::Permissions::from_mode(0o755)).unwrap();
        let weather = dir.path().join("site.epw");
        std::fs::write(&weather, "LOCATION,Test\n").unwrap();
        Self { dir, exe, weather }
    }

    fn config(&self, timeout: Duration) -> RunConfig {
        RunConfig {
            executable: self.exe.clone(),
            working_dir: self.dir.path().join("run"),
            timeout,
            weather: self.weather.clone(),
        }
    }

    fn fixture(&self, name: &str, text: &str) {
        std::fs::write(self.dir.path().join(name), text).unwrap();
    }
}

fn minimal_doc() -> IdfDocument {
    emit_with(&minimal_layout(), SystemsSpec::default()).unwrap()
}

#[test]
fn missing_executable_is_reported() {
    let stub = Stub::new("exit 0");
    let mut cfg = stub.config(Duration::from_secs(5));
    cfg.executable = stub.dir.path().join("no-such-energyplus");
    assert!(matches!(
        run_simulation(&minimal_doc(), &cfg),
        Err(EplusError::ExecutableNotFound(_))
    ));
    cfg.executable = PathBuf::from("planforge-no-such-binary");
    assert!(matches!(
        run_simulation(&minimal_doc(), &cfg),
        Err(EplusError::ExecutableNotFound(_))
    ));
}

#[test]
fn missing_weather_is_reported() {
    let stub = Stub::new("exit 0");
    let mut cfg = stub.config(Duration::from_secs(5));
    cfg.weather = stub.dir.path().join("missing.epw");
    assert!(matches!(
        run_simulation(&minimal_doc(), &cfg),
        Err(EplusError::WeatherNotFound(_))
    ));
}

#[test]
fn canned_output_parses_into_two_full_series() {
    let stub = Stub::new("cp \"$here/canned.csv\" \"$out/eplusout.csv\"\ncp \"$here/canned.err\" \"$out/eplusout.err\"\necho simulated");
    stub.fixture("canned.csv", &canned_year());
    stub.fixture(
        "canned.err",
        "   ** Warning ** something minor\n   ************* EnergyPlus Completed Successfully\n",
    );
    let cfg = stub.config(Duration::from_secs(30));
    let out = run_simulation(&minimal_doc(), &cfg).unwrap();
    assert_eq!(out.series.len(), 2);
    assert!(out.series.iter().all(|s| s.values.len() == 8760));
    assert_eq!(out.hours, (0..8760).collect::<Vec<_>>());
    assert_eq!(
        out.log,
        LogSummary {
            warnings: 1,
            severe_errors: 0,
            fatal: 0
        }
    );
    assert!(out.find(ZONE_TEMPERATURE, "Z-0-room").is_some());
    assert_eq!(
        out.find("Electricity:Facility", METER_KEY).unwrap().units,
        "J"
    );
    // the input, the captured console output and the outputs stay in the working directory
    let dir = &cfg.working_dir;
    assert!(std::fs::read_to_string(dir.join("in.idf"))
        .unwrap()
        .starts_with("Version, 8.8;"));
    assert_eq!(
        std::fs::read_to_string(dir.join("run.log")).unwrap().trim(),
        "simulated"
    );
    assert_eq!(out.into_result().engine, "energyplus");
}

#[test]
fn slow_runs_time_out() {
    let stub = Stub::new("sleep 20");
    let start = Instant::now();
    let err = run_simulation(&minimal_doc(), &stub.config(Duration::from_secs(1))).unwrap_err();
    assert!(
        matches!(err, EplusError::Timeout(d) if d == Duration::from_secs(1)),
        "{err:?}"
    );
    assert!(start.elapsed() < Duration::from_secs(10));
}

#[test]
fn severe_errors_fail_the_run_with_an_excerpt() {
    let stub = Stub::new("printf '   ** Severe  ** Zone missing\\n   **  Fatal  ** stopping\\n' > \"$out/eplusout.err\"");
    let err = run_simulation(&minimal_doc(), &stub.config(Duration::from_secs(30))).unwrap_err();
    match err {
        EplusError::SimulationFailed { message, excerpt } => {
            assert!(message.contains("1 severe"), "{message}");
            assert_eq!(
                excerpt,
                ["** Severe  ** Zone missing", "**  Fatal  ** stopping"]
            );
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn failing_exit_status_carries_the_console_log() {
    let stub = Stub::new("echo cannot read input\nexit 3");
    let err = run_simulation(&minimal_doc(), &stub.config(Duration::from_secs(30))).unwrap_err();
    match err {
        EplusError::SimulationFailed { excerpt, .. } => assert_eq!(excerpt, ["cannot read input"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn success_without_output_is_not_silent() {
    let stub = Stub::new("exit 0");
    let err = run_simulation(&minimal_doc(), &stub.config(Duration::from_secs(30))).unwrap_err();
    assert!(
        matches!(err, EplusError::SimulationFailed { .. }),
        "{err:?}"
    );
}

#[test]
fn run_slots_serialise_beyond_the_cap() {
    let stub = Stub::new("sleep 0.2\nexit 3");
    let slots = RunSlots::new(1);
    let doc = minimal_doc();
    let start = Instant::now();
    std::thread::scope(|s| {
        for i in 0..3 {
            let mut cfg = stub.config(Duration::from_secs(30));
            cfg.working_dir = stub.dir.path().join(format!("run{i}"));
            let (slots, doc) = (&slots, &doc);
            s.spawn(move || assert!(slots.run(doc, &cfg).is_err()));
        }
    });
    assert!(start.elapsed() >= Duration::from_millis(600));
}

#[test]
fn two_row_fixture_gives_one_series() {
    let text = "Date/Time,Z-0-BED:Zone Mean Air Temperature [C](Hourly)\n 01/01  01:00:00,20.5\n 01/01  02:00:00,20.25\n";
    let out = parse_outputs(text).unwrap();
    assert_eq!(out.series.len(), 1);
    let s = &out.series[0];
    assert_eq!(
        (s.variable.as_str(), s.key.as_str(), s.units.as_str()),
        (ZONE_TEMPERATURE, "Z-0-BED", "C")
    );
    assert_eq!(s.values, [20.5, 20.25]);
    assert_eq!(out.hours, [0, 1]);
}

fn malformed_line(text: &str) -> usize {
    match parse_outputs(text) {
        Err(EplusError::MalformedOutput { line, .. }) => line,
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_outputs_are_typed_errors() {
    assert_eq!(malformed_line(""), 1);
    assert_eq!(malformed_line("Time,A:B C [C](Hourly)\n"), 1);
    assert_eq!(malformed_line("Date/Time,no units here\n"), 1);
    assert_eq!(
        malformed_line(&format!(
            "{HEADER}\n 01/01  01:00:00,1,2\n 01/01  02:00:00,1\n"
        )),
        3
    );
    assert_eq!(
        malformed_line(&format!("{HEADER}\n 01/01  01:00:00,1,abc\n")),
        2
    );
    assert_eq!(
        malformed_line(&format!("{HEADER}\n 13/01  01:00:00,1,2\n")),
        2
    );
}

#[test]
fn column_sums_match_a_line_by_line_scan() {
    let text = canned_year();
    let out = parse_outputs(&text).unwrap();
    let mut oracle = [0.0f64; 2];
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let mut cells = line.split(',').skip(1);
        for acc in oracle.iter_mut() {
            *acc += cells.next().unwrap().parse::<f64>().unwrap();
        }
        rows += 1;
    }
    assert_eq!(rows, 8760);
    for (s, expected) in out.series.iter().zip(oracle) {
        let got: f64 = s.values.iter().sum();
        assert!(
            (got - expected).abs() <= 1e-9 * expected.abs().max(1.0),
            "{} {got} vs {expected}",
            s.variable
        );
    }
}

fn series(variable: &str, key: &str, values: Vec<f64>) -> HourlySeries {
    HourlySeries {
        variable: variable.into(),
        key: key.into(),
        units: "C".into(),
        values,
    }
}

proptest! {
    #[test]
    fn render_then_parse_is_the_identity(
        start in 0usize..8000,
        values in prop::collection::vec((-1e6f64..1e6, -1e3f64..1e3), 1..48),
    ) {
        let hours: Vec<usize> = (start..start + values.len()).collect();
        let out = SimulationOutput {
            hours,
            series: vec![
                series(ZONE_TEMPERATURE, "Z-1-KITCHEN", values.iter().map(|v| v.0).collect()),
                series("Electricity:Facility", METER_KEY, values.iter().map(|v| v.1).collect()),
            ],
            log: LogSummary::default(),
        };
        prop_assert_eq!(parse_outputs(&render_outputs(&out)).unwrap(), out);
    }
}

/// Weather for a real run: `PLANFORGE_EPW`, or the Golden, CO file shipped with EnergyPlus.
fn real_weather(exe: &Path) -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("PLANFORGE_EPW") {
        return Some(PathBuf::from(p));
    }
    let dir = exe.canonicalize().ok()?.parent()?.join("WeatherData");
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "epw"))
        .min()
}

#[test]
fn real_energyplus_runs_the_minimal_model() {
    let Some(exe) = std::env::var_os("ENERGYPLUS_EXE").map(PathBuf::from) else {
        println!("skipped: ENERGYPLUS_EXE is not set");
        return;
    };
    let weather = real_weather(&exe).expect("set PLANFORGE_EPW to a weather file");
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::new(Some(&exe), dir.path(), Duration::from_secs(600), &weather);
    let out = run_simulation(&minimal_doc(), &cfg).unwrap();
    assert_eq!(out.log.severe_errors, 0);
    assert_eq!(
        out.find(ZONE_TEMPERATURE, "Z-0-room").unwrap().values.len(),
        8760
    );
}
