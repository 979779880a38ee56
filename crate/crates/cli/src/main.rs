use std::fmt::Write as _;
use std::io::{IsTerminal, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use quasitoric::chordal::{build_graph, is_doubly_chordal_bipartite};
use quasitoric::ctfp::{
    check_equal_frequencies, check_frequency_condition, check_swap_condition, factorize,
    find_ctfp, glue, split, AxisOrigin, SplitSpec, TupleMultiset,
};
use quasitoric::facial::{render_pairs, slices_necessary_condition, summarize};
use quasitoric::lawrence::{
    is_star_forest_same_side, lift_is_ctfp, lift_ml_degree_prediction, modified_lawrence_lift,
};
use quasitoric::linalg::{rowspans_equal, RatMatrix};
use quasitoric::mle::{format_sig, ips_exact, ips_run, log_likelihood, IPSConfig};
use quasitoric::model::{
    build_a_matrix, fmt_tuple, format_rational, parse_rational, star_matrix,
    validate_multipartition, CountVector, IndexSet, MultipartitionMatrix,
};
use quasitoric::poset::{build_poset, indicator_combination};
use quasitoric::reparam::{build_bar_matrix, linear_decomposition, verify_internal_ctfp};
use quasitoric::{fixtures, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "quasitoric", version, about = "Quasi-independence model toolkit")]
struct Cli {
    /// Emit a JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions, A-matrix and (for 2-way sets) the chordality verdict.
    Analyze { file: String },
    /// Coordinate toric fiber product checks, factorization, search and gluing.
    Ctfp(CtfpArgs),
    /// Doubly chordal bipartite test with a forbidden-subgraph witness.
    Chordal { file: String },
    /// Maximal cliques, intersections, covers, levels and indicator combinations.
    Poset { file: String },
    /// The leveled reparametrization and, optionally, its linear decomposition.
    Reparam {
        file: String,
        #[arg(long)]
        decompose: bool,
    },
    /// Maximum likelihood estimation by iterative proportional scaling.
    Mle(MleArgs),
    /// Modified Lawrence lift of a 2-way set.
    Lawrence { file: String },
    /// Two-way slice scan of a k-way set.
    Slices { file: String },
}

#[derive(Args)]
struct CtfpArgs {
    file: String,
    /// Check one split: axis J and the comma-separated axes of the first factor.
    #[arg(long, num_args = 2, value_names = ["J", "INA"])]
    check: Option<Vec<String>>,
    /// Factor along one split.
    #[arg(long, num_args = 2, value_names = ["J", "INA"])]
    factor: Option<Vec<String>>,
    /// Try every canonical split.
    #[arg(long)]
    search: bool,
    /// Glue FILE with FILE2 along axis J1 of FILE and J2 of FILE2.
    #[arg(long, num_args = 3, value_names = ["FILE2", "J1", "J2"])]
    glue: Option<Vec<String>>,
}

#[derive(Args)]
struct MleArgs {
    file: String,
    /// Counts as a JSON array (inline or a file path), in lexicographic tuple order.
    #[arg(long)]
    counts: Option<String>,
    /// One exact IPS cycle (default).
    #[arg(long, conflicts_with = "iterate")]
    exact: bool,
    /// Floating-point IPS to convergence.
    #[arg(long)]
    iterate: bool,
    /// Use the leveled reparametrization of a 2-way set.
    #[arg(long)]
    reparam: bool,
    #[arg(long, default_value_t = 10_000)]
    max_cycles: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Draw random positive counts from this seed when --counts is absent.
    #[arg(long)]
    seed: Option<u64>,
}

/// A command failure with its exit code and an optional structured payload.
struct Failure {
    code: u8,
    message: String,
    detail: Option<Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
            detail: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_verification_failure() {
            4
        } else {
            match e {
                Error::ConditionFailed(_)
                | Error::NotDoublyChordal(_)
                | Error::ZeroMarginal { .. }
                | Error::NonPositiveCounts
                | Error::Disconnected(_) => 3,
                _ => 2,
            }
        };
        let detail = match &e {
            Error::ConditionFailed(w) => Some(json!({ "swap_witness": w })),
            Error::NotDoublyChordal(w) => Some(json!({ "witness": witness_json(w) })),
            _ => None,
        };
        Failure {
            code,
            message: e.to_string(),
            detail,
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs_digest: String,
    results: Value,
    warnings: Vec<String>,
}

struct Report {
    text: String,
    results: Value,
    warnings: Vec<String>,
}

struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new() -> Self {
        Inputs {
            hasher: Sha256::new(),
        }
    }

    fn digest(self) -> String {
        self.hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn bytes(&mut self, name: &str, data: &[u8]) {
        self.hasher.update(name.as_bytes());
        self.hasher.update([0]);
        self.hasher.update(data);
        self.hasher.update([0]);
    }

    /// Reads an index set from a JSON file, or `fixture:NAME`.
    fn set(&mut self, path: &str) -> Outcome<IndexSet> {
        if let Some(name) = path.strip_prefix("fixture:") {
            let set = fixtures::by_name(name).ok_or_else(|| {
                Failure::input(format!(
                    "unknown fixture `{name}`; known: {}",
                    fixtures::NAMES.join(", ")
                ))
            })?;
            self.bytes("set", serde_json::to_string(&set).unwrap().as_bytes());
            return Ok(set);
        }
        let data = std::fs::read(path)
            .map_err(|e| Failure::input(format!("cannot read {path}: {e}")))?;
        self.bytes("set", &data);
        serde_json::from_slice(&data).map_err(|e| Failure::input(format!("{path}: {e}")))
    }
}

struct Style {
    color: bool,
}

impl Style {
    fn detect(to_file: bool) -> Self {
        let disabled = std::env::var("QUASITORIC_COLOR")
            .map(|v| matches!(v.to_ascii_lowercase().as_str(), "0" | "never" | "off" | "false" | "no"))
            .unwrap_or(false);
        Style {
            color: !to_file && !disabled && std::io::stdout().is_terminal(),
        }
    }

    fn verdict(&self, ok: bool) -> String {
        let word = if ok { "PASS" } else { "FAIL" };
        if self.color {
            format!("\x1b[{}m{word}\x1b[0m", if ok { 32 } else { 31 })
        } else {
            word.to_string()
        }
    }
}

fn parse_axes(raw: &str, k: usize) -> Outcome<Vec<usize>> {
    raw.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .ok()
                .filter(|&a| a >= 1 && a <= k)
                .ok_or_else(|| Failure::input(format!("`{x}` is not an axis in 1..={k}")))
        })
        .collect()
}

fn parse_spec(raw: &[String], k: usize) -> Outcome<SplitSpec> {
    let j = raw[0]
        .parse::<usize>()
        .map_err(|_| Failure::input(format!("`{}` is not an axis", raw[0])))?;
    let in_a = parse_axes(&raw[1], k)?;
    Ok(SplitSpec::one_based(k, j, &in_a)?)
}

fn set_json(s: &IndexSet) -> Value {
    serde_json::to_value(s).unwrap()
}

fn multiset_json(ms: &TupleMultiset) -> Value {
    Value::Array(
        ms.iter()
            .map(|(t, m)| json!({ "tuple": t.iter().map(|x| x + 1).collect::<Vec<_>>(), "count": m }))
            .collect(),
    )
}

fn multiset_text(ms: &TupleMultiset) -> String {
    let parts: Vec<String> = ms
        .iter()
        .map(|(t, m)| {
            if *m == 1 {
                fmt_tuple(t)
            } else {
                format!("{}x{m}", fmt_tuple(t))
            }
        })
        .collect();
    format!("{{{{{}}}}}", parts.join(", "))
}

fn witness_json(w: &quasitoric::ChordalityWitness) -> Value {
    json!({
        "kind": w.kind,
        "vertices": w.vertices.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "text": w.to_string(),
    })
}

fn matrix_text(m: &MultipartitionMatrix) -> String {
    m.to_string()
}

fn cmd_analyze(inputs: &mut Inputs, style: &Style, file: &str) -> Outcome<Report> {
    let s = inputs.set(file)?;
    let a = build_a_matrix(&s);
    let validation = validate_multipartition(&a);
    if !validation.passed() {
        return Err(Failure {
            code: 4,
            message: "A-matrix fails multipartition validation".into(),
            detail: Some(serde_json::to_value(&validation).unwrap()),
        });
    }
    let mut text = String::new();
    writeln!(text, "k = {}, dims = {:?}, |S| = {}", s.k(), s.dims(), s.len()).unwrap();
    writeln!(text, "A-matrix: {} rows x {} columns, multipartition {}", a.n_rows(), a.n_cols(), style.verdict(true)).unwrap();
    write!(text, "{}", matrix_text(&a)).unwrap();
    let mut results = json!({
        "k": s.k(),
        "dims": s.dims(),
        "size": s.len(),
        "matrix": a,
        "multipartition_valid": true,
    });
    if s.k() == 2 {
        let g = build_graph(&s)?;
        let verdict = is_doubly_chordal_bipartite(&g);
        writeln!(text, "star matrix:\n{}", star_matrix(&s)?).unwrap();
        match &verdict {
            Ok(()) => writeln!(text, "doubly chordal bipartite: true (ML-degree 1)").unwrap(),
            Err(w) => writeln!(text, "doubly chordal bipartite: false, {w}").unwrap(),
        }
        results["m"] = json!(s.dims()[0]);
        results["n"] = json!(s.dims()[1]);
        results["doubly_chordal"] = json!(verdict.is_ok());
        results["witness"] = verdict.err().map(|w| witness_json(&w)).unwrap_or(Value::Null);
    }
    Ok(Report {
        text,
        results,
        warnings: Vec::new(),
    })
}

fn cmd_ctfp(inputs: &mut Inputs, style: &Style, args: &CtfpArgs) -> Outcome<Report> {
    let modes = [args.check.is_some(), args.factor.is_some(), args.search, args.glue.is_some()];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return Err(Failure::input(
            "choose exactly one of --check, --factor, --search, --glue",
        ));
    }
    let s = inputs.set(&args.file)?;
    let mut text = String::new();
    if let Some(raw) = &args.check {
        let spec = parse_spec(raw, s.k())?;
        let (first, second) = split(&s, &spec)?;
        let equal = check_equal_frequencies(&s, &spec)?;
        let freq = check_frequency_condition(&s, &spec)?;
        let witness = check_swap_condition(&s, &spec)?;
        writeln!(text, "split {spec}").unwrap();
        writeln!(text, "S^1 = {}", multiset_text(&first)).unwrap();
        writeln!(text, "S^2 = {}", multiset_text(&second)).unwrap();
        writeln!(text, "equal frequencies per shared state: {equal}").unwrap();
        writeln!(text, "frequency criterion: {}", style.verdict(freq)).unwrap();
        match &witness {
            None => writeln!(text, "swap criterion: {}", style.verdict(true)).unwrap(),
            Some(w) => writeln!(text, "swap criterion: {}, {w}", style.verdict(false)).unwrap(),
        }
        return Ok(Report {
            text,
            results: json!({
                "spec": spec,
                "s1_multiset": multiset_json(&first),
                "s2_multiset": multiset_json(&second),
                "equal_frequencies": equal,
                "frequency_condition": freq,
                "swap_condition": witness.is_none(),
                "swap_witness": witness,
                "is_ctfp": witness.is_none(),
            }),
            warnings: Vec::new(),
        });
    }
    if let Some(raw) = &args.factor {
        let spec = parse_spec(raw, s.k())?;
        let fact = factorize(&s, &spec)?;
        writeln!(text, "cTFP along {spec}").unwrap();
        writeln!(text, "S1 = {}", fact.s1).unwrap();
        writeln!(text, "S2 = {}", fact.s2).unwrap();
        writeln!(text, "predicted ML-degree: {}", fact.ml_degree_prediction()).unwrap();
        return Ok(Report {
            text,
            results: json!({
                "spec": spec,
                "s1": set_json(&fact.s1),
                "s2": set_json(&fact.s2),
                "ml_degree_prediction": fact.ml_degree_prediction().to_string(),
            }),
            warnings: Vec::new(),
        });
    }
    if args.search {
        let found = find_ctfp(&s)?;
        if found.is_empty() {
            writeln!(text, "not a cTFP").unwrap();
        }
        for f in &found {
            writeln!(text, "{}: S1 = {}, S2 = {}", f.spec, f.s1, f.s2).unwrap();
        }
        return Ok(Report {
            text,
            results: json!({
                "is_ctfp": !found.is_empty(),
                "splits": found.iter().map(|f| json!({
                    "spec": f.spec,
                    "s1": set_json(&f.s1),
                    "s2": set_json(&f.s2),
                })).collect::<Vec<_>>(),
            }),
            warnings: Vec::new(),
        });
    }
    let raw = args.glue.as_ref().unwrap();
    let other = inputs.set(&raw[0])?;
    let axis = |x: &str, k: usize| -> Outcome<usize> {
        x.parse::<usize>()
            .ok()
            .filter(|&a| a >= 1 && a <= k)
            .map(|a| a - 1)
            .ok_or_else(|| Failure::input(format!("`{x}` is not an axis in 1..={k}")))
    };
    let j1 = axis(&raw[1], s.k())?;
    let j2 = axis(&raw[2], other.k())?;
    let glued = glue(&s, j1, &other, j2)?;
    let provenance: Vec<String> = glued
        .provenance
        .iter()
        .map(|o| match o {
            AxisOrigin::First(x) => format!("first:{}", x + 1),
            AxisOrigin::Shared { first, second } => format!("shared:{}={}", first + 1, second + 1),
            AxisOrigin::Second(x) => format!("second:{}", x + 1),
        })
        .collect();
    writeln!(text, "{}", serde_json::to_string(&glued.set).unwrap()).unwrap();
    Ok(Report {
        text,
        results: json!({ "set": set_json(&glued.set), "provenance": provenance }),
        warnings: Vec::new(),
    })
}

fn cmd_chordal(inputs: &mut Inputs, file: &str) -> Outcome<Report> {
    let s = inputs.set(file)?;
    let g = build_graph(&s)?;
    let verdict = is_doubly_chordal_bipartite(&g);
    let mut text = String::new();
    writeln!(text, "vertices: {} rows, {} columns; edges: {}", g.m(), g.n(), g.edges().len()).unwrap();
    writeln!(text, "components: {}, forest: {}", g.components().len(), g.is_forest()).unwrap();
    match &verdict {
        Ok(()) => writeln!(text, "doubly chordal bipartite: true").unwrap(),
        Err(w) => writeln!(text, "doubly chordal bipartite: false, {w}").unwrap(),
    }
    Ok(Report {
        text,
        results: json!({
            "components": g.components().len(),
            "forest": g.is_forest(),
            "doubly_chordal": verdict.is_ok(),
            "witness": verdict.err().map(|w| witness_json(&w)),
        }),
        warnings: Vec::new(),
    })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn cmd_poset(inputs: &mut Inputs, file: &str) -> Outcome<Report> {
    let s = inputs.set(file)?;
    let p = build_poset(&s)?;
    let g = build_graph(&s)?;
    let mut text = String::new();
    writeln!(text, "maximal cliques (h = {}):", p.h).unwrap();
    for (c, clique) in p.cliques.iter().enumerate() {
        writeln!(text, "  D{} = {clique}  level {}", c + 1, p.levels[c]).unwrap();
    }
    let covers: Vec<String> = p.covers.iter().map(|(a, b)| format!("D{} < D{}", a + 1, b + 1)).collect();
    writeln!(text, "covers: {}", covers.join(", ")).unwrap();
    writeln!(text, "maximal intersections:").unwrap();
    let mut inters = Vec::new();
    for (x, inter) in p.intersections.iter().enumerate() {
        let (lo, hi) = p.intersection_covers[x];
        let comb = indicator_combination(&s, &inter.clique)?.minimal_support(&g);
        writeln!(
            text,
            "  D{}∩D{} = {}  level {}  indicator {}",
            lo + 1,
            hi + 1,
            inter.clique,
            p.intersection_level(x),
            comb
        )
        .unwrap();
        inters.push(json!({
            "rows": one_based(&inter.clique.rows),
            "cols": one_based(&inter.clique.cols),
            "cover": [lo + 1, hi + 1],
            "level": p.intersection_level(x),
            "indicator": comb.to_string(),
        }));
    }
    let mut e_rows = Vec::new();
    for i in 0..p.m() {
        e_rows.push(p.e_row(i)? + 1);
    }
    let mut e_cols = Vec::new();
    for j in 0..p.n() {
        e_cols.push(p.e_col(j)? + 1);
    }
    writeln!(text, "E_i: {}", e_rows.iter().map(|c| format!("D{c}")).collect::<Vec<_>>().join(" ")).unwrap();
    writeln!(text, "E^j: {}", e_cols.iter().map(|c| format!("D{c}")).collect::<Vec<_>>().join(" ")).unwrap();
    Ok(Report {
        text,
        results: json!({
            "cliques": p.cliques.iter().map(|c| json!({"rows": one_based(&c.rows), "cols": one_based(&c.cols)})).collect::<Vec<_>>(),
            "covers": p.covers.iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
            "levels": p.levels,
            "h": p.h,
            "intersections": inters,
            "e_rows": e_rows,
            "e_cols": e_cols,
        }),
        warnings: Vec::new(),
    })
}

fn rat_matrix(m: &MultipartitionMatrix) -> Outcome<RatMatrix> {
    Ok(RatMatrix::new(m.to_rat_rows(), m.n_cols())?)
}

fn cmd_reparam(inputs: &mut Inputs, style: &Style, file: &str, decompose: bool) -> Outcome<Report> {
    let s = inputs.set(file)?;
    let rep = build_bar_matrix(&s)?;
    let a = build_a_matrix(&s);
    let same_rowspan = rowspans_equal(&rat_matrix(&a)?, &rat_matrix(&rep.matrix)?)?;
    let valid = validate_multipartition(&rep.matrix).passed();
    let checks = verify_internal_ctfp(&rep)?;
    let mut warnings = Vec::new();
    let mut text = String::new();
    let sizes: Vec<usize> = rep.matrix.blocks.iter().map(|b| b.rows.len()).collect();
    writeln!(text, "h = {}, blocks of sizes {:?} ({} rows x {} columns)", rep.h(), sizes, rep.matrix.n_rows(), rep.matrix.n_cols()).unwrap();
    if a.to_int_rows() == rep.matrix.to_int_rows() {
        warnings.push("the reparametrization coincides with A_S".to_string());
    }
    write!(text, "{}", matrix_text(&rep.matrix)).unwrap();
    writeln!(text, "multipartition: {}", style.verdict(valid)).unwrap();
    writeln!(text, "rowspan equals A_S: {}", style.verdict(same_rowspan)).unwrap();
    for c in &checks {
        writeln!(text, "cTFP at coordinate {}: {}", c.coordinate + 1, style.verdict(c.passed)).unwrap();
    }
    writeln!(text, "tuples:").unwrap();
    let mut bar = Vec::new();
    for (col, t) in s.tuples().iter().zip(&rep.bar_tuples) {
        writeln!(text, "  {} -> {}", fmt_tuple(col), rep.render_tuple(t)).unwrap();
        bar.push(t.iter().map(|l| l.render(&rep.poset)).collect::<Vec<_>>());
    }
    let mut results = json!({
        "h": rep.h(),
        "matrix": rep.matrix,
        "barS": bar,
        "multipartition_valid": valid,
        "rowspan_equal": same_rowspan,
        "internal_ctfp": checks.iter().map(|c| json!({
            "coordinate": c.coordinate + 1,
            "passed": c.passed,
            "witness": c.witness,
        })).collect::<Vec<_>>(),
    });
    if decompose {
        let steps = linear_decomposition(&rep)?;
        let mut out = Vec::new();
        for step in &steps {
            let render = |t: &[quasitoric::reparam::Label]| rep.render_tuple(t);
            writeln!(text, "step r = {}:", step.r).unwrap();
            writeln!(text, "  T = {{{}}}", step.t.iter().map(|t| render(t)).collect::<Vec<_>>().join(", ")).unwrap();
            let t_prime: Vec<String> = step
                .t_prime
                .iter()
                .map(|(l, m)| {
                    let name = l.render(&rep.poset);
                    if *m == 1 { name } else { format!("{name}x{m}") }
                })
                .collect();
            writeln!(text, "  T' = {{{{{}}}}}", t_prime.join(", ")).unwrap();
            let mut parts = Vec::new();
            for x in &step.partition_index {
                let g: Vec<String> = step.g.get(x).map(|v| v.iter().map(|t| render(t)).collect()).unwrap_or_default();
                let h: Vec<String> = step
                    .h
                    .get(x)
                    .map(|v| {
                        v.iter()
                            .map(|(l, m)| {
                                let name = l.render(&rep.poset);
                                if *m == 1 { name } else { format!("{name}x{m}") }
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                writeln!(text, "  G_{0} = {{{1}}}  H_{0} = {{{2}}}", x.render(&rep.poset), g.join(", "), h.join(", ")).unwrap();
                parts.push(json!({ "index": x.render(&rep.poset), "G": g, "H": h }));
            }
            writeln!(text, "  reassembly, homogeneity and linearity: {}", style.verdict(true)).unwrap();
            out.push(json!({
                "r": step.r,
                "T": step.t.iter().map(|t| render(t)).collect::<Vec<_>>(),
                "T_prime": t_prime,
                "parts": parts,
                "glued": step.glued.iter().map(|(t, m)| json!({"tuple": render(t), "count": m})).collect::<Vec<_>>(),
            }));
        }
        results["decomposition"] = Value::Array(out);
    }
    Ok(Report {
        text,
        results,
        warnings,
    })
}

fn parse_counts(inputs: &mut Inputs, raw: &str) -> Outcome<Vec<BigRational>> {
    let data = if raw.trim_start().starts_with('[') {
        raw.as_bytes().to_vec()
    } else {
        std::fs::read(raw).map_err(|e| Failure::input(format!("cannot read {raw}: {e}")))?
    };
    inputs.bytes("counts", &data);
    let values: Vec<Value> = serde_json::from_slice(&data)
        .map_err(|e| Failure::input(format!("counts: {e}")))?;
    values
        .iter()
        .map(|v| match v {
            Value::Number(n) if n.is_i64() || n.is_u64() => Ok(parse_rational(&n.to_string())?),
            Value::String(s) => Ok(parse_rational(s)?),
            other => Err(Failure::input(format!(
                "count `{other}` must be an integer or a \"p/q\" string"
            ))),
        })
        .collect()
}

fn cmd_mle(inputs: &mut Inputs, args: &MleArgs) -> Outcome<Report> {
    let s = inputs.set(&args.file)?;
    let counts = match (&args.counts, args.seed) {
        (Some(raw), _) => parse_counts(inputs, raw)?,
        (None, Some(seed)) => {
            inputs.bytes("seed", &seed.to_le_bytes());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..s.len())
                .map(|_| BigRational::from_integer(rng.gen_range(1..=20).into()))
                .collect()
        }
        (None, None) => return Err(Failure::input("pass --counts or --seed")),
    };
    let u = CountVector::new(counts)?;
    if u.len() != s.len() {
        return Err(Failure::input(format!("{} counts for {} tuples", u.len(), s.len())));
    }
    let a = build_a_matrix(&s);
    let matrix = if args.reparam {
        build_bar_matrix(&s)?.matrix
    } else {
        a.clone()
    };
    let result = if args.iterate {
        ips_run(
            &matrix,
            &u.to_f64(),
            &IPSConfig {
                max_cycles: args.max_cycles,
                tolerance: args.tol,
            },
        )?
    } else {
        ips_exact(&matrix, &a, &u)?
    };
    let p = result.distribution.to_f64();
    let ll = log_likelihood(&p, &u.to_f64())?;
    let rendered = result.distribution.render();
    let mut text = String::new();
    writeln!(
        text,
        "parametrization: {}, method: {}",
        if args.reparam { "reparametrized" } else { "A_S" },
        if args.iterate { "iterative (float)" } else { "one cycle (exact)" }
    )
    .unwrap();
    for (t, x) in s.tuples().iter().zip(&rendered) {
        writeln!(text, "  p{} = {x}", fmt_tuple(t)).unwrap();
    }
    writeln!(text, "cycles: {}", result.cycles).unwrap();
    writeln!(text, "max |Birch residual|: {}", result.birch_residual_max_abs.render()).unwrap();
    writeln!(text, "converged: {}", result.converged).unwrap();
    writeln!(text, "log-likelihood: {}", format_sig(ll)).unwrap();
    Ok(Report {
        text,
        results: json!({
            "p_hat": rendered,
            "counts": u.entries().iter().map(format_rational).collect::<Vec<_>>(),
            "cycles": result.cycles,
            "birch_residual_max_abs": result.birch_residual_max_abs.render(),
            "exact": result.exact(),
            "converged": result.converged,
            "log_likelihood": format_sig(ll),
        }),
        warnings: result.warnings,
    })
}

fn cmd_lawrence(inputs: &mut Inputs, file: &str) -> Outcome<Report> {
    let s = inputs.set(file)?;
    let lift = modified_lawrence_lift(&s)?;
    let g = build_graph(&s)?;
    let star = is_star_forest_same_side(&g);
    let is_ctfp = lift_is_ctfp(&s)?;
    let mut warnings = Vec::new();
    let mut text = String::new();
    writeln!(text, "S' = {}", lift.s_prime).unwrap();
    write!(text, "{}", matrix_text(&lift.matrix)).unwrap();
    match star.side {
        Some(side) => writeln!(text, "star forest with centers on one side: true ({side:?})").unwrap(),
        None => writeln!(text, "star forest with centers on one side: false").unwrap(),
    }
    writeln!(text, "{}", if is_ctfp { "the lift is a cTFP" } else { "not a cTFP" }).unwrap();
    let prediction = match lift_ml_degree_prediction(&s) {
        Ok(d) => {
            writeln!(text, "predicted ML-degree of the lift: {d}").unwrap();
            json!(d)
        }
        Err(Error::Disconnected(reason)) => {
            writeln!(text, "predicted ML-degree of the lift: refused ({reason})").unwrap();
            warnings.push(format!("ML-degree prediction refused: {reason}"));
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    if g.is_forest() && !is_ctfp {
        let notice = "open question: whether another matrix with the same rowspan as the lift is a cTFP is not settled";
        writeln!(text, "{notice}").unwrap();
    }
    Ok(Report {
        text,
        results: json!({
            "source": set_json(&lift.source),
            "s_prime": set_json(&lift.s_prime),
            "matrix": lift.matrix,
            "star_forest": star.holds,
            "side": star.side,
            "is_ctfp": is_ctfp,
            "ml_degree_prediction": prediction,
        }),
        warnings,
    })
}

fn cmd_slices(inputs: &mut Inputs, style: &Style, file: &str) -> Outcome<Report> {
    let s = inputs.set(file)?;
    let scan = slices_necessary_condition(&s)?;
    let mut text = String::new();
    let mut list = Vec::new();
    for v in &scan.slices {
        let verdict = match v.doubly_chordal {
            None => "empty, skipped".to_string(),
            Some(ok) => style.verdict(ok),
        };
        writeln!(text, "{}: {} {}", v.slice.describe(), render_pairs(&v.slice), verdict).unwrap();
        if let Some(w) = &v.witness {
            writeln!(text, "    {w}").unwrap();
        }
        list.push(json!({
            "a": v.slice.a + 1,
            "b": v.slice.b + 1,
            "fixed": one_based(&v.slice.fixed),
            "pairs": v.slice.pairs.iter().map(|&(x, y)| [x + 1, y + 1]).collect::<Vec<_>>(),
            "empty": v.slice.is_empty(),
            "doubly_chordal": v.doubly_chordal,
            "witness": v.witness.as_ref().map(witness_json),
        }));
    }
    let summary = summarize(&scan);
    writeln!(text, "{summary}").unwrap();
    let mut warnings = Vec::new();
    if scan.empty > 0 {
        warnings.push(format!("{} empty slices skipped", scan.empty));
    }
    Ok(Report {
        text,
        results: json!({
            "passed": scan.passed(),
            "summary": summary,
            "empty_slices": scan.empty,
            "slices": list,
        }),
        warnings,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze { .. } => "analyze",
        Command::Ctfp(_) => "ctfp",
        Command::Chordal { .. } => "chordal",
        Command::Poset { .. } => "poset",
        Command::Reparam { .. } => "reparam",
        Command::Mle(_) => "mle",
        Command::Lawrence { .. } => "lawrence",
        Command::Slices { .. } => "slices",
    }
}

fn emit(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let style = Style::detect(cli.out.is_some() || cli.json);
    let mut inputs = Inputs::new();
    let outcome = match &cli.command {
        Command::Analyze { file } => cmd_analyze(&mut inputs, &style, file),
        Command::Ctfp(args) => cmd_ctfp(&mut inputs, &style, args),
        Command::Chordal { file } => cmd_chordal(&mut inputs, file),
        Command::Poset { file } => cmd_poset(&mut inputs, file),
        Command::Reparam { file, decompose } => cmd_reparam(&mut inputs, &style, file, *decompose),
        Command::Mle(args) => cmd_mle(&mut inputs, args),
        Command::Lawrence { file } => cmd_lawrence(&mut inputs, file),
        Command::Slices { file } => cmd_slices(&mut inputs, &style, file),
    };
    let name = command_name(&cli.command);
    let digest = inputs.digest();
    let code = match outcome {
        Ok(report) => {
            let body = if cli.json {
                let run = RunReport {
                    command: name.to_string(),
                    inputs_digest: digest,
                    results: report.results,
                    warnings: report.warnings,
                };
                serde_json::to_string_pretty(&run).unwrap() + "\n"
            } else {
                let mut body = report.text;
                for w in &report.warnings {
                    writeln!(body, "warning: {w}").unwrap();
                }
                body
            };
            if let Err(e) = emit(cli.out.as_deref(), &body) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if cli.json {
                let body = json!({
                    "command": name,
                    "inputs_digest": digest,
                    "error": f.message,
                    "exit_code": f.code,
                    "detail": f.detail,
                });
                let _ = emit(cli.out.as_deref(), &(serde_json::to_string_pretty(&body).unwrap() + "\n"));
            } else if let Some(d) = &f.detail {
                eprintln!("{d}");
            }
            f.code
        }
    };
    eprintln!("{name}: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
