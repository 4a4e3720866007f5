//! The `fmk3` command line front end.
//!
//! Exit codes: 0 success, 1 verification failures, 2 usage error,
//! 3 classification failure, 4 parse error.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{exact_divisors, omega};
use crate::corr::{descend, represent, verify_correspondence, Failure};
use crate::error::Error;
use crate::fmcalc::{induced_transform, partner_census, same_partner, MukaiVector};
use crate::halfplane::{
    central_charge, equivariance_defect, mobius, mukai_action, relative_error, HalfPlanePoint,
};
use crate::lattice::{discriminant_unit, is_isometry, is_orientation_preserving, Isometry, Mat3};
use crate::modgroup::{fricke_index, random_al, AlElement, AlElementJson, DEFAULT_BOUND};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_IN_IMAGE: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

/// Failures listed per check in a verify report; the counts are always complete.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "fmk3",
    version,
    about = "Atkin-Lehner groups, Mukai lattices and Fourier-Mukai partners of K3 surfaces of Picard rank one"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partner counts and Fricke indices for a range of degrees 2d.
    Table {
        #[arg(long, default_value_t = 1)]
        d_min: u64,
        #[arg(long, default_value_t = 50)]
        d_max: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Fourier-Mukai partners of a degree 2d K3 and their induced transforms.
    Partners {
        d: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Classify an Atkin-Lehner tuple or a 3x3 lattice matrix (file or stdin).
    Classify {
        input: Option<PathBuf>,
        /// Level for a bare 3x3 matrix input.
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sample-based verification of the whole correspondence.
    Verify {
        #[arg(long, default_value_t = 1)]
        d_min: u64,
        #[arg(long, default_value_t = 50)]
        d_max: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Self {
            stdout: String::new(),
            stderr: stderr.into(),
            code,
        }
    }
}

pub fn run(cli: Cli, stdin: &mut dyn Read) -> Outcome {
    match cli.command {
        Command::Table {
            d_min,
            d_max,
            format,
        } => cmd_table(d_min, d_max, format),
        Command::Partners { d, format } => cmd_partners(d, format),
        Command::Classify { input, d, format } => {
            let text = match input {
                Some(path) => std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display())),
                None => {
                    let mut buf = String::new();
                    stdin
                        .read_to_string(&mut buf)
                        .map(|_| buf)
                        .map_err(|e| format!("cannot read stdin: {e}"))
                }
            };
            match text {
                Ok(text) => cmd_classify(&text, d, format),
                Err(e) => Outcome::fail(EXIT_PARSE, e),
            }
        }
        Command::Verify {
            d_min,
            d_max,
            samples,
            seed,
            tol,
            format,
        } => cmd_verify(&VerifyConfig {
            d_min,
            d_max,
            samples_per_coset: samples,
            seed,
            tolerance: tol,
            format,
        }),
    }
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn check_range(d_min: u64, d_max: u64) -> Result<(), Outcome> {
    if d_min == 0 || d_min > d_max {
        return Err(Outcome::fail(
            EXIT_USAGE,
            format!("invalid range: need 1 <= d-min <= d-max, got {d_min}..{d_max}\n"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: u64,
    pub omega: usize,
    pub exact_divisors: usize,
    pub fm_number: usize,
    pub fricke_index: usize,
}

pub fn table_row(d: u64) -> crate::Result<TableRow> {
    Ok(TableRow {
        d,
        omega: omega(d)?,
        exact_divisors: exact_divisors(d)?.len(),
        fm_number: partner_census(d)?.fm_number,
        fricke_index: fricke_index(d)?,
    })
}

pub fn cmd_table(d_min: u64, d_max: u64, format: Format) -> Outcome {
    if let Err(o) = check_range(d_min, d_max) {
        return o;
    }
    let rows: crate::Result<Vec<TableRow>> = (d_min..=d_max).map(table_row).collect();
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("{e}\n")),
    };
    if let Some(bad) = rows.iter().find(|r| r.fm_number != r.fricke_index) {
        return Outcome::fail(
            EXIT_VERIFY_FAILED,
            format!(
                "partner count {} differs from [AL_d : Fr_d] = {} at d = {}\n",
                bad.fm_number, bad.fricke_index, bad.d
            ),
        );
    }
    let out = match format {
        Format::Json => json_line(&rows),
        Format::Csv => csv_string(
            &["d", "omega", "exact_divisors", "fm_number", "fricke_index"],
            rows.iter()
                .map(|r| {
                    vec![
                        r.d,
                        r.omega as u64,
                        r.exact_divisors as u64,
                        r.fm_number as u64,
                        r.fricke_index as u64,
                    ]
                    .into_iter()
                    .map(|x| x.to_string())
                    .collect()
                })
                .collect(),
        ),
        Format::Text => {
            let mut s = format!(
                "{:>8} {:>6} {:>8} {:>10} {:>13}\n",
                "d", "omega", "#s||d", "fm_number", "[AL_d:Fr_d]"
            );
            for r in &rows {
                s += &format!(
                    "{:>8} {:>6} {:>8} {:>10} {:>13}\n",
                    r.d, r.omega, r.exact_divisors, r.fm_number, r.fricke_index
                );
            }
            s
        }
    };
    Outcome::ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartnerEntry {
    pub r: u64,
    pub moduli: String,
    pub level: u64,
    pub image: AlElementJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartnersReport {
    pub d: u64,
    pub labels: Vec<PartnerEntry>,
    pub fm_number: usize,
}

pub fn partners_report(d: u64) -> crate::Result<PartnersReport> {
    let census = partner_census(d)?;
    let labels = census
        .labels
        .iter()
        .map(|l| {
            let t = induced_transform(d, l.r())?;
            Ok(PartnerEntry {
                r: l.r(),
                moduli: l.moduli(),
                level: t.image.s(),
                image: AlElementJson::from(&t.image),
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(PartnersReport {
        d,
        labels,
        fm_number: census.fm_number,
    })
}

pub fn cmd_partners(d: u64, format: Format) -> Outcome {
    let report = match partners_report(d) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("{e}\n")),
    };
    let out = match format {
        Format::Json => json_line(&report),
        Format::Csv => csv_string(
            &["d", "r", "moduli", "level", "a", "b", "c", "e"],
            report
                .labels
                .iter()
                .map(|l| {
                    let mut row = vec![
                        d.to_string(),
                        l.r.to_string(),
                        l.moduli.clone(),
                        l.level.to_string(),
                    ];
                    row.extend(l.image.abce.iter().cloned());
                    row
                })
                .collect(),
        ),
        Format::Text => {
            let mut s = format!("d = {}: {} Fourier-Mukai partner(s)\n", d, report.fm_number);
            for l in &report.labels {
                s += &format!(
                    "  {:<20} transform to X in W_{} with (a,b,c,e) = ({})\n",
                    l.moduli,
                    l.level,
                    l.image.abce.join(", ")
                );
            }
            s
        }
    };
    Outcome::ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub d: u64,
    pub s: u64,
    pub fricke: bool,
    pub discriminant_unit: u64,
    pub orientation: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ClassifyInput {
    Tuple(AlElementJson),
    Isometry { d: u64, matrix: Mat3 },
    Bare(Mat3),
}

/// Parses classify input into a lattice matrix; tuples are lifted through `R`.
fn parse_classify_input(text: &str, d: Option<u64>) -> Result<Isometry, Outcome> {
    let parse_err = |msg: String| Outcome::fail(EXIT_PARSE, format!("parse error: {msg}\n"));
    let input: ClassifyInput = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let check_level = |level: u64| match d {
        Some(given) if given != level => Err(parse_err(format!(
            "--d {given} disagrees with input level {level}"
        ))),
        _ => Ok(level),
    };
    match input {
        ClassifyInput::Tuple(j) => {
            check_level(j.d)?;
            let w = AlElement::try_from(j).map_err(parse_err)?;
            represent(&w).map_err(|e| Outcome::fail(EXIT_NOT_IN_IMAGE, format!("{e}\n")))
        }
        ClassifyInput::Isometry { d: level, matrix } => {
            Ok(Isometry::new(check_level(level)?, matrix))
        }
        ClassifyInput::Bare(matrix) => match d {
            Some(level) if level > 0 => Ok(Isometry::new(level, matrix)),
            _ => Err(Outcome::fail(
                EXIT_USAGE,
                "a bare 3x3 matrix needs --d <level>\n",
            )),
        },
    }
}

pub fn classify(g: &Isometry) -> crate::Result<Classification> {
    if !is_isometry(g) {
        return Err(Error::NotInImage(format!(
            "{} does not preserve the Gram matrix of N_{}",
            g.m, g.d
        )));
    }
    let w = descend(g)?;
    Ok(Classification {
        d: g.d,
        s: w.s(),
        fricke: w.is_fricke(),
        discriminant_unit: discriminant_unit(g)?.u,
        orientation: is_orientation_preserving(g)?,
    })
}

pub fn cmd_classify(text: &str, d: Option<u64>, format: Format) -> Outcome {
    let g = match parse_classify_input(text, d) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let c = match classify(&g) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_NOT_IN_IMAGE, format!("classification failed: {e}\n")),
    };
    let out = match format {
        Format::Json => json_line(&c),
        Format::Csv => csv_string(
            &["d", "s", "fricke", "discriminant_unit", "orientation"],
            vec![vec![
                c.d.to_string(),
                c.s.to_string(),
                c.fricke.to_string(),
                c.discriminant_unit.to_string(),
                c.orientation.to_string(),
            ]],
        ),
        Format::Text => format!(
            "d = {}: coset W_{} ({}), discriminant unit {}, orientation {}\n",
            c.d,
            c.s,
            if c.fricke { "Fricke" } else { "not Fricke" },
            c.discriminant_unit,
            if c.orientation {
                "preserved"
            } else {
                "reversed"
            }
        ),
    };
    Outcome::ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub d_min: u64,
    pub d_max: u64,
    pub samples_per_coset: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub format: Format,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            d_min: 1,
            d_max: 50,
            samples_per_coset: 50,
            seed: 0,
            tolerance: 1e-9,
            format: Format::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    /// Largest floating defect seen, for the toleranced checks.
    pub max_defect: Option<f64>,
    pub listed: Vec<Failure>,
}

impl CheckSummary {
    fn new(name: &str, floating: bool) -> Self {
        Self {
            name: name.to_string(),
            samples: 0,
            failures: 0,
            max_defect: floating.then_some(0.0),
            listed: Vec::new(),
        }
    }

    fn pass(&mut self) {
        self.samples += 1;
    }

    fn fail(&mut self, input: serde_json::Value) {
        self.samples += 1;
        self.failures += 1;
        if self.listed.len() < MAX_LISTED_FAILURES {
            self.listed.push(Failure {
                check: self.name.clone(),
                input,
            });
        }
    }

    fn defect(&mut self, value: f64, tol: f64, input: impl FnOnce() -> serde_json::Value) {
        if let Some(m) = self.max_defect.as_mut() {
            if value > *m || value.is_nan() {
                *m = value;
            }
        }
        if value <= tol {
            self.pass()
        } else {
            let mut v = input();
            v["defect"] = serde_json::json!(value);
            self.fail(v)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub d: u64,
    pub checks: Vec<CheckSummary>,
}

impl LevelReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub levels: Vec<LevelReport>,
    pub total_samples: usize,
    pub total_failures: usize,
    pub passed: bool,
}

fn level_rng(seed: u64, d: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(d);
    rng
}

fn random_point<R: Rng + ?Sized>(rng: &mut R) -> HalfPlanePoint {
    HalfPlanePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0)).expect("v > 0")
}

/// All checks at one level, driven by a generator seeded from `(seed, d)`.
pub fn verify_level(d: u64, samples: usize, seed: u64, tol: f64) -> LevelReport {
    let mut rng = level_rng(seed, d);
    let levels: Vec<u64> = exact_divisors(d)
        .expect("d >= 1")
        .iter()
        .map(|e| e.s)
        .collect();

    let mut correspondence = CheckSummary::new("correspondence", false);
    let report = verify_correspondence(d, samples, &mut rng);
    correspondence.samples = report.checked;
    correspondence.failures = report.failures.len();
    correspondence.listed = report
        .failures
        .into_iter()
        .take(MAX_LISTED_FAILURES)
        .collect();

    let mut census = CheckSummary::new("census", false);
    match table_row(d) {
        Ok(row) => {
            let formula = if d == 1 { 1 } else { 1usize << (row.omega - 1) };
            if row.fm_number == row.fricke_index && row.fm_number == formula {
                census.pass()
            } else {
                census.fail(serde_json::to_value(&row).expect("row"))
            }
        }
        Err(e) => census.fail(serde_json::json!({ "error": e.to_string() })),
    }

    let mut homomorphism = CheckSummary::new("homomorphism", false);
    for _ in 0..samples {
        let x = random_al(
            d,
            levels[rng.gen_range(0..levels.len())],
            &mut rng,
            DEFAULT_BOUND,
        )
        .expect("exact divisor");
        let y = random_al(
            d,
            levels[rng.gen_range(0..levels.len())],
            &mut rng,
            DEFAULT_BOUND,
        )
        .expect("exact divisor");
        let ok = (|| -> crate::Result<bool> {
            Ok(represent(&x.mul(&y)?)? == represent(&x)?.compose(&represent(&y)?)?)
        })();
        match ok {
            Ok(true) => homomorphism.pass(),
            _ => homomorphism.fail(serde_json::json!({ "x": x, "y": y })),
        }
    }

    let mut construction = CheckSummary::new("induced_transform", false);
    let mut action = CheckSummary::new("mukai_action", true);
    let mut charge = CheckSummary::new("central_charge", true);
    let mut equivariance = CheckSummary::new("equivariance", true);
    for &r in &levels {
        let t = match induced_transform(d, r) {
            Ok(t) => t,
            Err(e) => {
                construction.fail(serde_json::json!({ "r": r, "error": e.to_string() }));
                continue;
            }
        };
        let s = d / r;
        let exact_ok = (|| -> crate::Result<bool> {
            let n = &t.n_y;
            let integral = (num_bigint::BigInt::from(r) + num_bigint::BigInt::from(d) * n)
                % (r * r)
                == 0.into();
            let level = descend(&represent(&t.image)?)?.s();
            Ok(integral
                && t.image.s() == s
                && level == s
                && same_partner(&t) == (t.source == t.target))
        })();
        match exact_ok {
            Ok(true) => construction.pass(),
            _ => construction.fail(serde_json::json!({ "r": r, "transform": t })),
        }

        let sb = num_bigint::BigInt::from(s);
        let v_y = MukaiVector::new(d, t.r.clone(), t.n_y.clone(), &sb * &t.n_y * &t.n_y);
        let v_x = MukaiVector::new(d, t.r.clone(), t.n_x.clone(), sb);
        for _ in 0..samples {
            let z = random_point(&mut rng);
            let input = || serde_json::json!({ "r": r, "z": [z.u, z.v] });
            match (
                mukai_action(d, &t.r, &t.n_y, &t.n_x, z),
                mobius(&t.image, z),
            ) {
                (Ok(k), Ok(m)) => {
                    action.defect(relative_error(k.z(), m.z()), tol, input);
                    let prod = central_charge(z.u, z.v, &v_y) * central_charge(m.u, m.v, &v_x);
                    charge.defect((prod - 1.0).norm(), tol, input);
                }
                _ => {
                    action.fail(input());
                    charge.fail(input());
                }
            }
            match equivariance_defect(&t.image, z) {
                Ok(x) => equivariance.defect(x, tol, input),
                Err(_) => equivariance.fail(input()),
            }
        }
    }
    for &s in &levels {
        for _ in 0..samples {
            let w = random_al(d, s, &mut rng, DEFAULT_BOUND).expect("exact divisor");
            let z = random_point(&mut rng);
            let input = || serde_json::json!({ "element": w, "z": [z.u, z.v] });
            match equivariance_defect(&w, z) {
                Ok(x) => equivariance.defect(x, tol, input),
                Err(_) => equivariance.fail(input()),
            }
        }
    }

    LevelReport {
        d,
        checks: vec![
            correspondence,
            census,
            homomorphism,
            construction,
            action,
            charge,
            equivariance,
        ],
    }
}

pub fn verify(config: &VerifyConfig) -> VerifyReport {
    let levels: Vec<LevelReport> = (config.d_min..=config.d_max)
        .into_par_iter()
        .map(|d| verify_level(d, config.samples_per_coset, config.seed, config.tolerance))
        .collect();
    let total_samples = levels
        .iter()
        .flat_map(|l| &l.checks)
        .map(|c| c.samples)
        .sum();
    let total_failures: usize = levels.iter().map(LevelReport::failures).sum();
    VerifyReport {
        config: config.clone(),
        levels,
        total_samples,
        total_failures,
        passed: total_failures == 0,
    }
}

pub fn cmd_verify(config: &VerifyConfig) -> Outcome {
    if let Err(o) = check_range(config.d_min, config.d_max) {
        return o;
    }
    if config.samples_per_coset == 0 || config.tolerance.is_nan() || config.tolerance < 0.0 {
        return Outcome::fail(EXIT_USAGE, "need --samples >= 1 and a nonnegative --tol\n");
    }
    let report = verify(config);
    let out = match config.format {
        Format::Json => json_line(&report),
        Format::Csv => csv_string(
            &["d", "check", "samples", "failures", "max_defect"],
            report
                .levels
                .iter()
                .flat_map(|l| {
                    l.checks.iter().map(move |c| {
                        vec![
                            l.d.to_string(),
                            c.name.clone(),
                            c.samples.to_string(),
                            c.failures.to_string(),
                            c.max_defect.map(|x| format!("{x:e}")).unwrap_or_default(),
                        ]
                    })
                })
                .collect(),
        ),
        Format::Text => {
            let mut s = String::new();
            for l in &report.levels {
                let parts: Vec<String> = l
                    .checks
                    .iter()
                    .map(|c| format!("{} {}/{}", c.name, c.samples - c.failures, c.samples))
                    .collect();
                s += &format!("d={:<5} {}\n", l.d, parts.join("  "));
            }
            s += &format!(
                "{}: {} samples, {} failures\n",
                if report.passed { "PASS" } else { "FAIL" },
                report.total_samples,
                report.total_failures
            );
            s
        }
    };
    Outcome {
        stdout: out,
        stderr: String::new(),
        code: if report.passed {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        },
    }
}
