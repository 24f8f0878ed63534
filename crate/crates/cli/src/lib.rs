//! Command dispatch and `report_v1` reports for the `lingroups` binary.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use lingroups::arith::{self, ArithGroupDesc, DensityMethod, LatticeFamily, LatticeOpts};
use lingroups::congruence::MapRecord;
use lingroups::exact::groupfile::GroupFile;
use lingroups::exact::{Field, GeneratedGroup, Matrix};
use lingroups::structure::{self, Certificate, Config, Verdict};
use lingroups::Error;

pub const SCHEMA: &str = "report_v1";

pub const COMMANDS: &[&str] = &[
    "isfinite",
    "order",
    "issbf",
    "tits",
    "issolvable",
    "isnbf",
    "isabf",
    "iscbf",
    "isnilpotent",
    "iscr",
    "crpart",
    "isintegral",
    "level",
    "index",
    "member",
    "issubgroup",
    "normalclosure",
    "issubnormal",
    "normalizer",
    "isdense",
    "primes",
    "orbit",
    "stabilizer",
];

/// Options that influence a result; recorded in every report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_pres: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_skip: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
}

/// Everything except timing: identical inputs give identical bodies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub command: String,
    pub input_digest: String,
    pub flags: Flags,
    pub value: Value,
    pub verdict: String,
    pub certificate: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub body: Body,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    ReplayMismatch(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::ReplayMismatch(e) => write!(f, "replay mismatch: {e}"),
        }
    }
}

impl CliError {
    /// 0 computed, 1 replay mismatch or internal failure, 2 unsupported input,
    /// 3 cap exceeded, 4 parse error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Parse(_)) | CliError::Io(_) => 4,
            CliError::Core(Error::CapExceeded { .. }) => 3,
            CliError::Core(Error::Internal(_)) | CliError::ReplayMismatch(_) => 1,
            CliError::Core(_) => 2,
        }
    }
}

pub fn digest(text: &str) -> String {
    format!("sha256:{:x}", Sha256::digest(text.as_bytes()))
}

fn config(flags: &Flags, map: Option<MapRecord>) -> Config {
    let d = Config::default();
    Config {
        order_cap: flags.cap_order.unwrap_or(d.order_cap),
        pres_cap: flags.cap_pres.unwrap_or(d.pres_cap),
        seed: flags.seed.unwrap_or(d.seed),
        map_skip: flags.map_skip.unwrap_or(0),
        prime: flags.prime,
        map,
        ..d
    }
}

fn lattice_opts(flags: &Flags) -> LatticeOpts {
    let d = LatticeOpts::default();
    LatticeOpts { cap: flags.cap_order.map(Some).unwrap_or(d.cap), bound: flags.bound.unwrap_or(d.bound), ..d }
}

fn fmt_matrix(f: &Field, m: &Matrix) -> Value {
    Value::from(m.rows().iter().map(|r| r.iter().map(|x| f.fmt_scalar(x)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn cert_json(c: &Certificate) -> Value {
    serde_json::to_value(c).expect("serializable certificate")
}

fn parse_vector(s: Option<&String>, name: &str) -> Result<Vec<BigInt>, CliError> {
    let s = s.ok_or_else(|| Error::InvalidInput(format!("--{name} is required")))?;
    s.split(',')
        .map(|x| BigInt::from_str(x.trim()).map_err(|_| Error::Parse(format!("bad --{name} entry {x:?}")).into()))
        .collect()
}

fn family(flags: &Flags, g: &GeneratedGroup) -> Result<LatticeFamily, CliError> {
    if *g.field() != Field::Rational {
        return Err(Error::InvalidInput("lattice commands need integer matrices over Q".into()).into());
    }
    Ok(LatticeFamily::parse(flags.family.as_deref().unwrap_or("SL"), g.degree())?)
}

fn verdict_value(v: &Verdict, yes: &str, no: &str) -> (Value, String, Value) {
    (Value::Bool(v.value), if v.value { yes } else { no }.to_string(), cert_json(&v.cert))
}

fn recorded_map(replay: Option<&Body>) -> Result<Option<MapRecord>, CliError> {
    let Some(b) = replay else { return Ok(None) };
    match b.certificate.get("map") {
        Some(Value::Null) | None => Ok(None),
        Some(m) => serde_json::from_value(m.clone())
            .map(Some)
            .map_err(|e| Error::Parse(format!("certificate map: {e}")).into()),
    }
}

fn desc_value(d: &ArithGroupDesc) -> Value {
    json!({
        "level": d.level,
        "image_order": d.image_order().to_string(),
        "index": arith::index_in_gamma(d).to_string(),
    })
}

/// Runs one command on the text of a group file.
pub fn execute(command: &str, text: &str, flags: &Flags, replay: Option<&Body>) -> Result<Body, CliError> {
    let gf = GroupFile::parse(text)?;
    let (g, elements) = gf.load()?;
    let f = g.field().clone();
    let cfg = config(flags, recorded_map(replay)?);
    let (value, verdict, certificate) = match command {
        "isfinite" => {
            let v = structure::is_finite(&g, &cfg)?;
            // an SW map is injective on a finite group in characteristic 0
            let yes = match (&v.cert.image_order, f.characteristic()) {
                (Some(o), 0) => format!("finite, order {o}"),
                _ => "finite".to_string(),
            };
            verdict_value(&v, &yes, "infinite")
        }
        "order" => {
            let (o, c) = structure::order_of_finite(&g, &cfg)?;
            (Value::from(o.to_string()), format!("order {o}"), cert_json(&c))
        }
        "issbf" | "tits" => verdict_value(
            &structure::is_solvable_by_finite(&g, &cfg)?,
            "solvable-by-finite",
            "not solvable-by-finite (contains free subgroup by Tits alternative)",
        ),
        "issolvable" => verdict_value(&structure::is_solvable(&g, &cfg)?, "solvable", "not solvable"),
        "isnbf" => {
            verdict_value(&structure::is_nilpotent_by_finite(&g, &cfg)?, "nilpotent-by-finite", "not nilpotent-by-finite")
        }
        "isabf" => {
            verdict_value(&structure::is_abelian_by_finite(&g, &cfg)?, "abelian-by-finite", "not abelian-by-finite")
        }
        "iscbf" => {
            verdict_value(&structure::is_central_by_finite(&g, &cfg)?, "central-by-finite", "not central-by-finite")
        }
        "isnilpotent" => verdict_value(&structure::is_nilpotent(&g, &cfg)?, "nilpotent", "not nilpotent"),
        "iscr" => verdict_value(
            &structure::is_completely_reducible(&g, &cfg)?,
            "completely reducible",
            "not completely reducible",
        ),
        "isintegral" => verdict_value(
            &structure::is_integral_sf(&g, &cfg)?,
            "conjugate into GL(n, Z)",
            "not conjugate into GL(n, Z)",
        ),
        "crpart" => {
            let c = structure::cr_part(&g)?;
            let value = json!({
                "blocks": c.blocks,
                "completely_reducible": c.completely_reducible,
                "change": fmt_matrix(&f, &c.change),
                "pi_generators": c.pi_gens.iter().map(|m| fmt_matrix(&f, m)).collect::<Vec<_>>(),
            });
            let verdict = format!("block sizes {:?}", c.blocks);
            (value, verdict, json!({}))
        }
        "level" | "index" => {
            let fam = family(flags, &g)?;
            let (d, tr) = arith::describe(&fam, g.gens(), &lattice_opts(flags))?;
            let index = arith::index_in_gamma(&d);
            let cert = json!({
                "primes": arith::level_primes(&fam, g.gens(), &lattice_opts(flags))?,
                "deltas": tr.deltas.iter().map(|(m, dl)| json!([m, dl.to_string()])).collect::<Vec<_>>(),
            });
            if command == "level" {
                (json!({"level": d.level, "index": index.to_string()}), format!("level {} index {index}", d.level), cert)
            } else {
                (Value::from(index.to_string()), format!("index {index}"), cert)
            }
        }
        "member" | "issubgroup" => {
            let fam = family(flags, &g)?;
            if elements.is_empty() {
                return Err(Error::InvalidInput("the group file lists no elements".into()).into());
            }
            let (d, _) = arith::describe(&fam, g.gens(), &lattice_opts(flags))?;
            let flags_v = elements.iter().map(|x| arith::membership(&d, x)).collect::<Result<Vec<_>, _>>()?;
            let cert = json!({"level": d.level});
            if command == "member" {
                let all = flags_v.iter().all(|&b| b);
                (Value::from(flags_v), if all { "member" } else { "not all members" }.to_string(), cert)
            } else {
                let sub = flags_v.iter().all(|&b| b);
                (Value::Bool(sub), if sub { "subgroup" } else { "not a subgroup" }.to_string(), cert)
            }
        }
        "normalclosure" => {
            let fam = family(flags, &g)?;
            let d = arith::normal_closure_desc(&fam, g.gens(), lattice_opts(flags).cap)?;
            let v = desc_value(&d);
            let verdict = format!("level {} index {}", d.level, arith::index_in_gamma(&d));
            (v, verdict, json!({"el_level": arith::el_level(g.gens())?}))
        }
        "issubnormal" => {
            let fam = family(flags, &g)?;
            let opts = lattice_opts(flags);
            let (d, _) = arith::describe(&fam, g.gens(), &opts)?;
            let sub = arith::is_subnormal(&d, g.gens(), opts.subnormal_exponent)?;
            let nor = arith::is_normal(&d, g.gens(), opts.subnormal_exponent)?;
            let verdict = match (sub, nor) {
                (_, true) => "normal",
                (true, false) => "subnormal, not normal",
                _ => "not subnormal",
            };
            let cert = json!({"level": d.level, "el_level": arith::el_level(g.gens())?});
            (json!({"subnormal": sub, "normal": nor}), verdict.to_string(), cert)
        }
        "normalizer" => {
            let fam = family(flags, &g)?;
            let opts = lattice_opts(flags);
            let (d, _) = arith::describe(&fam, g.gens(), &opts)?;
            let n = arith::normalizer_desc(&d, cfg.order_cap)?;
            let verdict = format!("normalizer of level {} index {}", n.level, arith::index_in_gamma(&n));
            (desc_value(&n), verdict, json!({"level": d.level}))
        }
        "isdense" => {
            let fam = family(flags, &g)?;
            let d = arith::is_dense(&fam, g.gens(), &cfg, lattice_opts(flags).cap)?;
            let method = match d.method {
                DensityMethod::ModPrime(p) => format!("surjective mod {p}"),
                DensityMethod::Adjoint => "adjoint representation".to_string(),
            };
            (Value::Bool(d.dense), if d.dense { "dense" } else { "not dense" }.to_string(), json!({"method": method}))
        }
        "primes" => {
            let fam = family(flags, &g)?;
            let opts = lattice_opts(flags);
            let ps = arith::primes_for_dense(&fam, g.gens(), opts.bound, opts.cap)?;
            let verdict = format!("non-surjective primes up to {}: {ps:?}", opts.bound);
            (Value::from(ps), verdict, json!({"bound": opts.bound}))
        }
        "orbit" => {
            let fam = family(flags, &g)?;
            let u = parse_vector(flags.u.as_ref(), "u")?;
            let v = parse_vector(flags.v.as_ref(), "v")?;
            let w = match flags.modulus {
                Some(m) => arith::orbit_gamma(&fam, &u, &v, m)?,
                None => {
                    let (d, _) = arith::describe(&fam, g.gens(), &lattice_opts(flags))?;
                    arith::orbit_subgroup(&d, &u, &v)?
                }
            };
            let cert = json!({
                "a": w.a.to_string(),
                "witness": w.g.as_ref().map(|m| fmt_matrix(&f, m)),
                "factors": w.factors.iter().map(|m| fmt_matrix(&f, m)).collect::<Vec<_>>(),
            });
            (Value::Bool(w.found), if w.found { "same orbit" } else { "different orbits" }.to_string(), cert)
        }
        "stabilizer" => {
            let fam = family(flags, &g)?;
            let u = parse_vector(flags.u.as_ref(), "u")?;
            let s = arith::stabilizer_gamma(&fam, &u)?;
            let value = json!({
                "sigma": fmt_matrix(&f, &s.sigma),
                "generators": s.gens.iter().map(|m| fmt_matrix(&f, m)).collect::<Vec<_>>(),
            });
            (value, format!("{} stabilizer generators", s.gens.len()), json!({}))
        }
        other => return Err(Error::InvalidInput(format!("unknown command {other:?}")).into()),
    };
    Ok(Body { command: command.to_string(), input_digest: digest(text), flags: flags.clone(), value, verdict, certificate })
}

/// Reruns a recorded report with its own flags and map; errors unless the value matches.
pub fn replay(recorded: &Report, text: &str) -> Result<Body, CliError> {
    let old = &recorded.body;
    if old.input_digest != digest(text) {
        return Err(CliError::ReplayMismatch("the group file differs from the recorded input".into()));
    }
    let new = execute(&old.command, text, &old.flags, Some(old))?;
    if new.value != old.value {
        return Err(CliError::ReplayMismatch(format!("recorded {} but computed {}", old.value, new.value)));
    }
    Ok(new)
}

pub fn render_text(r: &Report) -> String {
    let b = &r.body;
    let mut s = String::new();
    let _ = writeln!(s, "command: {}", b.command);
    let _ = writeln!(s, "input: {}", b.input_digest);
    let _ = writeln!(s, "verdict: {}", b.verdict);
    let _ = writeln!(s, "value: {}", b.value);
    if let Value::Object(m) = &b.certificate {
        for (k, v) in m {
            if !v.is_null() {
                let _ = writeln!(s, "{k}: {v}");
            }
        }
    }
    if let Some(rp) = &r.replay {
        let _ = writeln!(s, "replay: {rp}");
    }
    let _ = writeln!(s, "time: {} ms", r.wall_time_ms);
    s
}

pub fn render_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("serializable report")
}
