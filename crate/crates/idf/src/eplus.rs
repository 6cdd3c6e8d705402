//! Runs an installed EnergyPlus on an emitted document and reads its hourly outputs.
//!
//! Only the comma-separated hourly file produced by `energyplus -r` is consumed. Column
//! headers look like `ZONE:Zone Mean Air Temperature [C](Hourly)`; meters have no key and are
//! stored under [`METER_KEY`].

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use planforge_core::reporting::{HourlySeries, SimulationResult};
use thiserror::Error;

use crate::document::IdfDocument;

/// Environment variable that overrides the configured executable.
pub const EXE_ENV: &str = "ENERGYPLUS_EXE";
/// Key given to meter columns, which carry no zone or system key.
pub const METER_KEY: &str = "Meter";
pub const INPUT_FILE: &str = "in.idf";
pub const OUTPUT_CSV: &str = "eplusout.csv";
pub const ERROR_FILE: &str = "eplusout.err";
pub const RUN_LOG: &str = "run.log";

const EXCERPT_LINES: usize = 20;
const POLL: Duration = Duration::from_millis(20);
const MONTH_DAYS: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

#[derive(Debug, Error)]
pub enum EplusError {
    #[error("EnergyPlus executable not found: {0}")]
    ExecutableNotFound(PathBuf),
    #[error("weather file not readable: {0}")]
    WeatherNotFound(PathBuf),
    #[error("simulation exceeded {0:?}")]
    Timeout(Duration),
    #[error("simulation failed: {message}")]
    SimulationFailed {
        message: String,
        excerpt: Vec<String>,
    },
    #[error("malformed output at line {line}: {message}")]
    MalformedOutput { line: usize, message: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> EplusError {
    let context = context.into();
    move |source| EplusError::Io { context, source }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub executable: PathBuf,
    /// Receives the input, the simulator's outputs and `run.log`.
    pub working_dir: PathBuf,
    pub timeout: Duration,
    pub weather: PathBuf,
}

impl RunConfig {
    /// Builds a configuration, letting `ENERGYPLUS_EXE` take precedence over `executable`.
    pub fn new(
        executable: Option<&Path>,
        working_dir: &Path,
        timeout: Duration,
        weather: &Path,
    ) -> Self {
        let executable = std::env::var_os(EXE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| executable.map(Path::to_path_buf))
            .unwrap_or_else(|| PathBuf::from("energyplus"));
        Self {
            executable,
            working_dir: working_dir.to_path_buf(),
            timeout,
            weather: weather.to_path_buf(),
        }
    }
}

/// Resolves a bare command name through `PATH`; paths are checked as given.
pub fn find_executable(exe: &Path) -> Option<PathBuf> {
    if exe.components().count() > 1 || exe.is_absolute() {
        return exe.is_file().then(|| exe.to_path_buf());
    }
    std::env::var_os("PATH")
        .into_iter()
        .flat_map(|p| std::env::split_paths(&p).collect::<Vec<_>>())
        .map(|dir| dir.join(exe))
        .find(|p| p.is_file())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LogSummary {
    pub warnings: usize,
    pub severe_errors: usize,
    pub fatal: usize,
}

/// Counts the warning, severe and fatal lines of an error file and keeps the severe and fatal
/// ones as an excerpt. Continuation lines (`**   ~~~   **`) are not counted.
pub fn summarize_log(text: &str) -> (LogSummary, Vec<String>) {
    let mut s = LogSummary::default();
    let mut excerpt = Vec::new();
    for line in text.lines() {
        let squashed: String = line.chars().filter(|c| !c.is_whitespace()).collect();
        if squashed.starts_with("**Warning**") {
            s.warnings += 1;
        } else if squashed.starts_with("**Severe**") {
            s.severe_errors += 1;
            excerpt.push(line.trim().to_string());
        } else if squashed.starts_with("**Fatal**") {
            s.fatal += 1;
            excerpt.push(line.trim().to_string());
        }
    }
    excerpt.truncate(EXCERPT_LINES);
    (s, excerpt)
}

/// Hourly series of one run on a shared time axis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimulationOutput {
    /// Hour of year (0-based) of every row.
    pub hours: Vec<usize>,
    pub series: Vec<HourlySeries>,
    pub log: LogSummary,
}

impl SimulationOutput {
    pub fn find(&self, variable: &str, key: &str) -> Option<&HourlySeries> {
        self.series
            .iter()
            .find(|s| s.variable == variable && s.key.eq_ignore_ascii_case(key))
    }

    pub fn into_result(self) -> SimulationResult {
        SimulationResult {
            engine: "energyplus".into(),
            series: self.series,
        }
    }
}

/// Parses `MM/DD  HH:MM:SS` (hour 1 to 24 marks the end of the interval) into an hour of year.
fn parse_hour(text: &str) -> Option<usize> {
    let mut parts = text.split_whitespace();
    let (date, time) = (parts.next()?, parts.next()?);
    let (m, d) = date.split_once('/')?;
    let (month, day): (usize, usize) = (m.parse().ok()?, d.parse().ok()?);
    let hour: usize = time.split(':').next()?.parse().ok()?;
    if !(1..=12).contains(&month)
        || day == 0
        || day > MONTH_DAYS[month - 1]
        || !(1..=24).contains(&hour)
    {
        return None;
    }
    let day_of_year: usize = MONTH_DAYS[..month - 1].iter().sum::<usize>() + day - 1;
    Some(day_of_year * 24 + hour - 1)
}

fn format_hour(hour: usize) -> String {
    let (mut day, h) = (hour / 24, hour % 24 + 1);
    let mut month = 0;
    while month < 11 && day >= MONTH_DAYS[month] {
        day -= MONTH_DAYS[month];
        month += 1;
    }
    format!(" {:02}/{:02}  {:02}:00:00", month + 1, day + 1, h)
}

/// Splits `KEY:Variable [Units](Hourly)` into variable, key and units.
fn parse_header(col: &str) -> Option<(String, String, String)> {
    let col = col.trim();
    let rest = col.strip_suffix(')')?;
    let open = rest.rfind('(')?;
    let rest = rest[..open].trim_end();
    let rest = rest.strip_suffix(']')?;
    let bracket = rest.rfind('[')?;
    let units = rest[bracket + 1..].trim().to_string();
    let name = rest[..bracket].trim();
    // variable names contain spaces; meter names such as Electricity:Facility do not
    match name.rsplit_once(':') {
        Some((key, var)) if var.contains(' ') && !key.is_empty() => {
            Some((var.trim().into(), key.trim().into(), units))
        }
        _ if !name.is_empty() => Some((name.into(), METER_KEY.into(), units)),
        _ => None,
    }
}

/// Parses the hourly comma-separated output of a run.
pub fn parse_outputs(text: &str) -> Result<SimulationOutput, EplusError> {
    let bad = |line: usize, message: String| EplusError::MalformedOutput { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty output".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols[0].trim() != "Date/Time" {
        return Err(bad(
            1,
            format!(
                "expected 'Date/Time' as first column, found '{}'",
                cols[0].trim()
            ),
        ));
    }
    let mut series = Vec::with_capacity(cols.len() - 1);
    for c in &cols[1..] {
        let (variable, key, units) =
            parse_header(c).ok_or_else(|| bad(1, format!("unrecognised column '{}'", c.trim())))?;
        series.push(HourlySeries {
            variable,
            key,
            units,
            values: Vec::new(),
        });
    }
    let mut hours = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(bad(
                n,
                format!("{} fields, header has {}", fields.len(), cols.len()),
            ));
        }
        hours.push(
            parse_hour(fields[0])
                .ok_or_else(|| bad(n, format!("unparsable date '{}'", fields[0].trim())))?,
        );
        for (s, f) in series.iter_mut().zip(&fields[1..]) {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| bad(n, format!("unparsable number '{}'", f.trim())))?;
            s.values.push(v);
        }
    }
    Ok(SimulationOutput {
        hours,
        series,
        log: LogSummary::default(),
    })
}

/// Writes outputs in the format [`parse_outputs`] reads.
pub fn render_outputs(out: &SimulationOutput) -> String {
    let mut text = String::from("Date/Time");
    for s in &out.series {
        if s.key == METER_KEY {
            text.push_str(&format!(",{} [{}](Hourly)", s.variable, s.units));
        } else {
            text.push_str(&format!(",{}:{} [{}](Hourly)", s.key, s.variable, s.units));
        }
    }
    text.push('\n');
    for (row, &h) in out.hours.iter().enumerate() {
        text.push_str(&format_hour(h));
        for s in &out.series {
            // `{}` on f64 prints the shortest text that parses back to the same value
            text.push_str(&format!(",{}", s.values[row]));
        }
        text.push('\n');
    }
    text
}

fn tail(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap_or_default();
    let lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[lines.len().saturating_sub(EXCERPT_LINES)..].to_vec()
}

/// Starts the simulator, retrying briefly when a freshly written executable is still held open
/// for writing by a concurrent fork (`ETXTBSY`).
fn spawn(exe: &Path, config: &RunConfig, input: &Path, log: &File) -> Result<Child, EplusError> {
    const TEXT_FILE_BUSY: i32 = 26;
    let mut attempt = 0;
    loop {
        let out = log.try_clone().map_err(io("duplicating log handle"))?;
        let err = log.try_clone().map_err(io("duplicating log handle"))?;
        let result = Command::new(exe)
            .arg("-w")
            .arg(&config.weather)
            .arg("-d")
            .arg(&config.working_dir)
            .arg("-r")
            .arg(input)
            .current_dir(&config.working_dir)
            .stdin(Stdio::null())
            .stdout(out)
            .stderr(err)
            .spawn();
        match result {
            Err(e) if e.raw_os_error() == Some(TEXT_FILE_BUSY) && attempt < 5 => {
                attempt += 1;
                thread::sleep(POLL * attempt);
            }
            other => return other.map_err(io(format!("starting {}", exe.display()))),
        }
    }
}

/// Writes the document into the working directory, runs the simulator and parses its outputs.
pub fn run_simulation(
    idf: &IdfDocument,
    config: &RunConfig,
) -> Result<SimulationOutput, EplusError> {
    let exe = find_executable(&config.executable)
        .ok_or_else(|| EplusError::ExecutableNotFound(config.executable.clone()))?;
    if !config.weather.is_file() {
        return Err(EplusError::WeatherNotFound(config.weather.clone()));
    }
    if config.timeout.is_zero() {
        return Err(EplusError::SimulationFailed {
            message: "timeout must be positive".into(),
            excerpt: Vec::new(),
        });
    }
    let dir = &config.working_dir;
    fs::create_dir_all(dir).map_err(io(format!("creating {}", dir.display())))?;
    let input = dir.join(INPUT_FILE);
    fs::write(&input, idf.render()).map_err(io(format!("writing {}", input.display())))?;
    let log_path = dir.join(RUN_LOG);
    let log = File::create(&log_path).map_err(io(format!("creating {}", log_path.display())))?;
    let mut child = spawn(&exe, config, &input, &log)?;
    let started = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait().map_err(io("waiting for simulator"))? {
            break status;
        }
        if started.elapsed() >= config.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(EplusError::Timeout(config.timeout));
        }
        thread::sleep(POLL);
    };
    let (summary, excerpt) = match fs::read_to_string(dir.join(ERROR_FILE)) {
        Ok(text) => summarize_log(&text),
        Err(_) => (LogSummary::default(), Vec::new()),
    };
    if !status.success() {
        let excerpt = if excerpt.is_empty() {
            tail(&log_path)
        } else {
            excerpt
        };
        return Err(EplusError::SimulationFailed {
            message: format!("simulator exited with {status}"),
            excerpt,
        });
    }
    if summary.fatal > 0 || summary.severe_errors > 0 {
        let message = format!(
            "{} severe and {} fatal errors",
            summary.severe_errors, summary.fatal
        );
        return Err(EplusError::SimulationFailed { message, excerpt });
    }
    let csv_path = dir.join(OUTPUT_CSV);
    let text = fs::read_to_string(&csv_path).map_err(|_| EplusError::SimulationFailed {
        message: format!("no hourly output at {}", csv_path.display()),
        excerpt: tail(&log_path),
    })?;
    let mut out = parse_outputs(&text)?;
    out.log = summary;
    Ok(out)
}

/// Caps the number of simulator processes running at once; callers beyond the cap wait.
#[derive(Debug)]
pub struct RunSlots {
    max: usize,
    busy: Mutex<usize>,
    freed: Condvar,
}

impl RunSlots {
    pub fn new(max: usize) -> Self {
        Self {
            max: max.max(1),
            busy: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    pub fn run(
        &self,
        idf: &IdfDocument,
        config: &RunConfig,
    ) -> Result<SimulationOutput, EplusError> {
        {
            let mut busy = self.busy.lock().unwrap_or_else(|e| e.into_inner());
            while *busy >= self.max {
                busy = self.freed.wait(busy).unwrap_or_else(|e| e.into_inner());
            }
            *busy += 1;
        }
        let result = run_simulation(idf, config);
        *self.busy.lock().unwrap_or_else(|e| e.into_inner()) -= 1;
        self.freed.notify_one();
        result
    }
}

impl Default for RunSlots {
    fn default() -> Self {
        Self::new(2)
    }
}
