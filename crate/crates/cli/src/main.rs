use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use mpv_core::bounds;
use mpv_core::error::{MpvError, Result};
use mpv_core::lie::{self, KernelOptions};
use mpv_core::linalg::{self, CacheHeader, RankMode, SparseMatrix};
use mpv_core::lincomb::{format_q, LinComb};
use mpv_core::numeric::{self, check_relation};
use mpv_core::octahedral::{self, Selection};
use mpv_core::relations::{self, family_set_string, parse_family_set, relation_to_json, Family, RelationRow};
use mpv_core::words::{composition_to_word, Composition, Level, Word};

const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "mpv", version, about = "Relations among multiple polylogarithm values at roots of unity")]
struct Cli {
    /// Print the full JSON report instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Rank computation mode.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Seed for the modular prime.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Modular,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form bound D(w,N).
    Bounds {
        #[arg(short)]
        w: usize,
        #[arg(short = 'N')]
        n: u32,
        /// Also report (5p+7)(p+1)/24 for prime N at weight 2.
        #[arg(long)]
        improved: bool,
    },
    /// Rank of the coproduct matrix, or with --bound the value-level standard bound.
    Rank {
        #[arg(short)]
        w: usize,
        #[arg(short = 'N')]
        n: u32,
        #[arg(long, default_value = "I,II,III,IV")]
        families: String,
        /// Add the octahedral rows (level 4, weights 3 and 4).
        #[arg(long)]
        octahedral: bool,
        #[arg(long, value_parser = parse_selection, default_value = "listed")]
        selection: Selection,
        /// Use every weight split in families I and II.
        #[arg(long)]
        all_splits: bool,
        #[arg(long)]
        bound: bool,
    },
    /// Octahedral relations at weight 3 or 4.
    Derive {
        #[arg(short)]
        w: usize,
        #[arg(long, value_parser = parse_selection, default_value = "listed")]
        selection: Selection,
        /// Check every emitted relation numerically at this tolerance.
        #[arg(long)]
        verify: Option<f64>,
    },
    /// The level-p² bracket identity.
    Claim {
        #[arg(long)]
        p: u32,
    },
    /// Kernel of β on the default depth-one generators.
    Beta {
        #[arg(long)]
        level: u32,
    },
    /// Lie-algebra checks at level 4.
    Lie {
        #[arg(long)]
        check_generators: bool,
        #[arg(long)]
        all_splits: bool,
        #[arg(long, value_parser = parse_selection, default_value = "listed")]
        selection: Selection,
        /// Ihara bracket of two elements, e.g. `e(1)` `[e0,e(2)]`.
        #[arg(long, num_args = 2, value_names = ["U", "V"])]
        bracket: Option<Vec<String>>,
        #[arg(short = 'N', default_value_t = 4)]
        n: u32,
    },
    /// Numeric value of `Li[s..;a..]@N` or a word.
    Eval {
        symbol: String,
        #[arg(long, default_value_t = 1e-12)]
        err: f64,
        #[arg(short = 'N')]
        n: Option<u32>,
        /// Also evaluate the truncated series with this many terms.
        #[arg(long)]
        series: Option<usize>,
    },
    /// Reduce a weight-3 level-4 word or composition to the nine-symbol basis.
    Reduce { symbol: String },
    /// Octahedral identity rows.
    Octahedral {
        #[arg(long)]
        weight: usize,
        #[arg(long)]
        emit_rows: bool,
        #[arg(long)]
        derive_conj: bool,
        #[arg(long, value_parser = parse_selection, default_value = "listed")]
        selection: Selection,
    },
}

fn parse_selection(s: &str) -> std::result::Result<Selection, String> {
    s.parse().map_err(|e: MpvError| e.to_string())
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: Value,
    engine_version: &'static str,
    matrix_checksums: BTreeMap<String, String>,
    mode: String,
    certified: String,
    wall_time_s: f64,
}

struct Ctx {
    mode: RankMode,
    checksums: BTreeMap<String, String>,
    cache_dir: PathBuf,
}

impl Ctx {
    fn mode_name(&self) -> String {
        match self.mode {
            RankMode::Exact => "exact".into(),
            RankMode::Modular { seed } => format!("modular(seed={seed})"),
        }
    }

    fn certified(&self) -> &'static str {
        match self.mode {
            RankMode::Exact => "exact rank",
            RankMode::Modular { .. } => "rank mod p <= rank over Q: dimension bounds are upper bounds",
        }
    }

    /// Loads a cached matrix or stores a freshly built one; records its checksum.
    fn cached(&mut self, key: &str, header: CacheHeader, build: impl FnOnce() -> Result<SparseMatrix>) -> Result<SparseMatrix> {
        let path = self.cache_dir.join(format!("{key}-v{ENGINE_VERSION}.mtx"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok((h, m)) = linalg::parse_cache(&text) {
                if h == header {
                    self.checksums.insert(key.into(), sha256(&text));
                    return Ok(m);
                }
            }
        }
        let m = build()?;
        let text = linalg::write_cache(&header, &m);
        if std::fs::create_dir_all(&self.cache_dir).is_ok() {
            let _ = std::fs::write(&path, &text);
        }
        self.checksums.insert(key.into(), sha256(&text));
        Ok(m)
    }
}

fn sha256(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

struct Outcome {
    result: Value,
    gates: BTreeMap<&'static str, bool>,
}

fn level(n: u32) -> Result<Level> {
    Level::new(n)
}

fn rank_cmd(ctx: &mut Ctx, w: usize, n: u32, families: &str, octa: bool, sel: Selection, all_splits: bool, bound: bool) -> Result<Outcome> {
    let l = level(n)?;
    let fams = parse_family_set(families)?;
    let octa_rows = if octa {
        if n != 4 {
            return Err(MpvError::Invalid("--octahedral needs -N 4".into()));
        }
        octahedral::extract_octahedral_rows_with(w, sel)?
    } else {
        Vec::new()
    };
    let mut gates = BTreeMap::new();
    if bound {
        let r = relations::standard_bound(w, l, &octa_rows, ctx.mode)?;
        gates.insert("bound_nonnegative", r.rank.rank <= r.symbols);
        return Ok(Outcome {
            result: json!({
                "weight": w, "level": n, "symbols": r.symbols, "rows": r.rows,
                "rank": r.rank.rank, "prime": r.rank.prime, "bound": r.bound,
                "octahedral_rows": octa_rows.len(),
            }),
            gates,
        });
    }
    let mut key_fams = fams.clone();
    if octa {
        key_fams.push(Family::OCTA);
    }
    let fam_str = family_set_string(&key_fams);
    let key = format!("rank-w{w}-N{n}-{}{}-{:?}", fam_str.replace(',', "_"), if all_splits { "-all" } else { "" }, sel).to_lowercase();
    let cols = (n as usize + 1).pow(w as u32);
    let header = CacheHeader { weight: w, level: n, families: fam_str, cols };
    let mut nrows = 0;
    let m = ctx.cached(&key, header, || {
        let mut m = if all_splits {
            relations::assemble_all_splits_matrix(w, l, &fams)?
        } else {
            relations::assemble_standard_matrix(w, l, &fams)?
        };
        m.push(octa_rows.iter().cloned());
        m.to_sparse()
    })?;
    nrows += m.nrows();
    let r = linalg::rank(&m, ctx.mode)?;
    gates.insert("rank_within_shape", r.rank <= nrows.min(m.ncols()));
    Ok(Outcome {
        result: json!({
            "weight": w, "level": n, "families": families, "octahedral": octa,
            "rows": nrows, "cols": m.ncols(), "rank": r.rank, "prime": r.prime,
            "kernel": m.ncols() - r.rank,
        }),
        gates,
    })
}

fn rows_json(rows: &[RelationRow], w: usize, l: Level) -> Value {
    json!(rows.iter().map(|r| relation_to_json(r, w, l)).collect::<Vec<_>>())
}

fn verify_rows(rows: &[RelationRow], l: Level, tol: f64) -> Result<(bool, f64)> {
    let mut ev = numeric::Evaluator::new(l);
    let mut worst: f64 = 0.0;
    for r in rows {
        worst = worst.max(ev.combination(&r.terms)?.norm());
    }
    Ok((worst < tol, worst))
}

fn conj_json(rel: &LinComb<Composition>) -> Value {
    let coeffs = octahedral::conj_display_coefficients(rel);
    json!({
        "relation": rel.iter().map(|(c, x)| (c.to_string(), format_q(x))).collect::<BTreeMap<_, _>>(),
        "display_coefficients": coeffs.iter().map(format_q).collect::<Vec<_>>(),
    })
}

fn derive_cmd(ctx: &mut Ctx, w: usize, sel: Selection, verify: Option<f64>) -> Result<Outcome> {
    let l = level(4)?;
    let rows = octahedral::extract_octahedral_rows_with(w, sel)?;
    let base = relations::standard_bound(w, l, &[], ctx.mode)?;
    let aug = relations::standard_bound(w, l, &rows, ctx.mode)?;
    let gain = aug.rank.rank - base.rank.rank;
    let mut gates = BTreeMap::new();
    gates.insert("bound_is_2_pow_w", aug.bound == 1 << w);
    let mut result = json!({
        "weight": w, "selection": format!("{sel:?}").to_lowercase(), "rows": rows.len(),
        "independent_new_rows": gain, "standard_bound": base.bound, "bound": aug.bound,
    });
    if w == 3 {
        let rel = octahedral::derive_conj()?;
        let coeffs: Vec<String> = octahedral::conj_display_coefficients(&rel).iter().map(format_q).collect();
        gates.insert("conj_coefficients", coeffs == ["5", "46", "-7", "-13", "13", "-1", "25", "-8", "18"]);
        result["conj"] = conj_json(&rel);
    } else {
        gates.insert("five_new_rows", gain == 5);
    }
    if let Some(tol) = verify {
        let (ok, worst) = verify_rows(&rows, l, tol)?;
        gates.insert("numeric", ok);
        result["max_residual"] = json!(worst);
        if w == 3 {
            let rel = octahedral::derive_conj()?;
            let lc: LinComb<Word> = rel
                .iter()
                .map(|(c, x)| {
                    let (s, w) = composition_to_word(c);
                    (w, x * mpv_core::lincomb::q(s as i64))
                })
                .collect();
            let (ok, res) = check_relation(&lc, l, tol)?;
            gates.insert("conj_numeric", ok);
            result["conj_residual"] = json!(res);
        }
    }
    Ok(Outcome { result, gates })
}

fn beta_cmd(n: u32) -> Result<Outcome> {
    let l = level(n)?;
    let root = (n as f64).sqrt().round() as u32;
    let mut gates = BTreeMap::new();
    let (gens, family) = if linalg::is_prime_u64(n as u64) {
        (lie::level_p_generators(n)?, "f_a")
    } else if root * root == n && linalg::is_prime_u64(root as u64) {
        (lie::level_p2_generators(root)?, "g_kj")
    } else {
        return Err(MpvError::Invalid(format!("level {n} is neither p nor p^2")));
    };
    let k = lie::beta_kernel(l, &gens)?;
    if family == "f_a" && n >= 5 {
        gates.insert("matches_(p^2-1)/24", k.dim as u64 == bounds::kernel_beta_formula(n as u64)?);
    }
    gates.insert("nonzero_kernel", k.dim > 0);
    Ok(Outcome {
        result: json!({
            "level": n, "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "generator_family": family, "wedges": k.wedges, "image_rank": k.image_rank,
            "kernel": k.dim, "zero_index_brackets": k.zero_index_brackets, "basis": k.basis,
        }),
        gates,
    })
}

fn lie_cmd(check: bool, all_splits: bool, sel: Selection, bracket: Option<Vec<String>>, n: u32) -> Result<Outcome> {
    let mut gates = BTreeMap::new();
    let mut result = json!({});
    if let Some(b) = bracket {
        let l = level(n)?;
        let u = lie::parse_lie(&b[0], l)?;
        let v = lie::parse_lie(&b[1], l)?;
        let r = lie::ihara_bracket(&u, &v, n);
        result["bracket"] = json!(r.to_string());
    }
    if check {
        let s1 = lie::sigma_involution(&lie::v1()) == lie::v1().scaled(&mpv_core::lincomb::q(-1));
        let s2 = lie::sigma_involution(&lie::v2()) == lie::v2().scaled(&mpv_core::lincomb::q(-1));
        gates.insert("sigma_v1", s1);
        gates.insert("sigma_v2", s2);
        let opts = KernelOptions { octahedral: Some(sel), all_splits };
        let t = lie::generator_tower_check(opts)?;
        gates.insert("v1_in_kernel", t.v1_in_kernel);
        gates.insert("v2_in_kernel", t.v2_in_kernel);
        gates.insert("brackets_in_kernel", t.degrees.iter().all(|d| d.brackets_in_kernel));
        gates.insert("brackets_independent", t.degrees.iter().all(|d| d.brackets_independent));
        gates.insert("sigma_antisymmetric", t.degrees.iter().all(|d| d.sigma_antisymmetric));
        gates.insert("kernel_dims_free_tower", t.degrees.iter().all(|d| d.kernel_dim == d.expected_generators));
        result["tower"] = serde_json::to_value(&t).map_err(|e| MpvError::Invalid(e.to_string()))?;
    }
    Ok(Outcome { result, gates })
}

fn eval_cmd(symbol: &str, err: f64, n: Option<u32>, series: Option<usize>) -> Result<Outcome> {
    let mut gates = BTreeMap::new();
    let (res, comp) = if symbol.starts_with("Li[") {
        let c: Composition = symbol.parse()?;
        (numeric::eval_composition(&c, err)?, Some(c))
    } else {
        let l = level(n.ok_or_else(|| MpvError::Invalid("words need -N".into()))?)?;
        let w: Word = symbol.parse()?;
        w.check_level(l)?;
        (numeric::eval_word(&w, l, err)?, None)
    };
    gates.insert("error_within_target", res.est_error <= err);
    let mut result = json!({
        "value_re": res.value.re, "value_im": res.value.im, "est_error": res.est_error,
        "method": format!("{:?}", res.method).to_lowercase(),
    });
    if let (Some(terms), Some(c)) = (series, comp) {
        let s = numeric::eval_composition_series(&c, terms)?;
        result["series"] = json!({"value_re": s.value.re, "value_im": s.value.im, "est_error": s.est_error});
        result["difference"] = json!((s.value - res.value).norm());
    }
    Ok(Outcome { result, gates })
}

fn reduce_cmd(ctx: &Ctx, symbol: &str) -> Result<Outcome> {
    let l = level(4)?;
    let (sign, w) = if symbol.starts_with("Li[") {
        let c: Composition = symbol.parse()?;
        composition_to_word(&c)
    } else {
        (1, symbol.parse::<Word>()?)
    };
    w.check_level(l)?;
    if w.weight() != 3 || !w.is_convergent() {
        return Err(MpvError::Invalid("reduce takes a convergent weight-3 symbol at level 4".into()));
    }
    let red = relations::fact_reduction(ctx.mode)?;
    let img = red.get(&w).cloned().unwrap_or_else(|| LinComb::unit(w.clone()));
    let basis: BTreeMap<Word, Composition> = relations::fact_basis()
        .into_iter()
        .map(|c| {
            let (_, w) = composition_to_word(&c);
            (w, c)
        })
        .collect();
    // c(w) = sign * Li(c); express Li(input) through the basis compositions
    let mut out: BTreeMap<String, String> = BTreeMap::new();
    let mut lhs = LinComb::unit(w.clone());
    for (bw, x) in img.iter() {
        let (bs, _) = composition_to_word(&basis[bw]);
        let coef = x * mpv_core::lincomb::q((sign * bs) as i64);
        out.insert(basis[bw].to_string(), format_q(&coef));
        lhs.add_term(bw.clone(), -x.clone());
    }
    let (ok, res) = check_relation(&lhs, l, 1e-10)?;
    let mut gates = BTreeMap::new();
    gates.insert("numeric", ok);
    Ok(Outcome { result: json!({"symbol": symbol, "word": w.to_string(), "reduction": out, "residual": res}), gates })
}

fn octahedral_cmd(ctx: &mut Ctx, weight: usize, emit: bool, conj: bool, sel: Selection) -> Result<Outcome> {
    let l = level(4)?;
    let rows = octahedral::extract_octahedral_rows_with(weight, sel)?;
    let mut gates = BTreeMap::new();
    let mut result = json!({"weight": weight, "rows": rows.len()});
    if emit {
        result["relations"] = rows_json(&rows, weight, l);
    }
    if conj {
        if weight != 3 {
            return Err(MpvError::Invalid("--derive-conj is a weight-3 operation".into()));
        }
        let rel = octahedral::derive_conj()?;
        result["conj"] = conj_json(&rel);
    }
    let aug = relations::standard_bound(weight, l, &rows, ctx.mode)?;
    result["bound"] = json!(aug.bound);
    gates.insert("bound_is_2_pow_w", aug.bound == 1 << weight);
    Ok(Outcome { result, gates })
}

fn run(cli: &Cli, ctx: &mut Ctx) -> Result<(String, Value, Outcome)> {
    Ok(match &cli.cmd {
        Cmd::Bounds { w, n, improved } => {
            let l = level(*n)?;
            let mut r = bounds::bound_report(*w, l);
            if !improved {
                r.improved = None;
            } else if r.improved.is_none() && *w == 2 {
                r.improved = Some(bounds::improved_prime_bound(*n as u64)?);
            }
            let mut gates = BTreeMap::new();
            gates.insert("improved_le_D", r.improved.is_none_or(|i| i <= r.d));
            let v = serde_json::to_value(&r).map_err(|e| MpvError::Invalid(e.to_string()))?;
            ("bounds".into(), json!({"w": w, "N": n, "improved": improved}), Outcome { result: v, gates })
        }
        Cmd::Rank { w, n, families, octahedral, selection, all_splits, bound } => (
            "rank".into(),
            json!({"w": w, "N": n, "families": families, "octahedral": octahedral, "all_splits": all_splits, "bound": bound}),
            rank_cmd(ctx, *w, *n, families, *octahedral, *selection, *all_splits, *bound)?,
        ),
        Cmd::Derive { w, selection, verify } => {
            ("derive".into(), json!({"w": w, "verify": verify}), derive_cmd(ctx, *w, *selection, *verify)?)
        }
        Cmd::Claim { p } => {
            let r = lie::verify_claim(*p)?;
            let mut gates = BTreeMap::new();
            gates.insert("zero", r.is_zero);
            gates.insert("term_count_h_p2", r.distinct_terms == r.expected_terms);
            gates.insert("unit_coefficients", r.unit_coefficients);
            let v = serde_json::to_value(&r).map_err(|e| MpvError::Invalid(e.to_string()))?;
            ("claim".into(), json!({"p": p}), Outcome { result: v, gates })
        }
        Cmd::Beta { level } => ("beta".into(), json!({"level": level}), beta_cmd(*level)?),
        Cmd::Lie { check_generators, all_splits, selection, bracket, n } => (
            "lie".into(),
            json!({"check_generators": check_generators, "all_splits": all_splits}),
            lie_cmd(*check_generators, *all_splits, *selection, bracket.clone(), *n)?,
        ),
        Cmd::Eval { symbol, err, n, series } => {
            ("eval".into(), json!({"symbol": symbol, "err": err}), eval_cmd(symbol, *err, *n, *series)?)
        }
        Cmd::Reduce { symbol } => ("reduce".into(), json!({"symbol": symbol}), reduce_cmd(ctx, symbol)?),
        Cmd::Octahedral { weight, emit_rows, derive_conj, selection } => (
            "octahedral".into(),
            json!({"weight": weight}),
            octahedral_cmd(ctx, *weight, *emit_rows, *derive_conj, *selection)?,
        ),
    })
}

fn print_flat(v: &Value) {
    if let Value::Object(m) = v {
        for (k, x) in m {
            match x {
                Value::Object(_) | Value::Array(_) => {}
                Value::String(s) => println!("{k}={s}"),
                _ => println!("{k}={x}"),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = match cli.mode {
        Mode::Exact => RankMode::Exact,
        Mode::Modular => RankMode::Modular { seed: cli.seed },
    };
    let cache_dir = std::env::var_os("MPV_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".mpv-cache"));
    let mut ctx = Ctx { mode, checksums: BTreeMap::new(), cache_dir };
    let start = Instant::now();
    match run(&cli, &mut ctx) {
        Ok((command, parameters, out)) => {
            let manifest = RunManifest {
                command,
                parameters,
                engine_version: ENGINE_VERSION,
                matrix_checksums: ctx.checksums.clone(),
                mode: ctx.mode_name(),
                certified: ctx.certified().into(),
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            let pass = out.gates.values().all(|g| *g);
            if cli.json {
                let doc = json!({"manifest": manifest, "result": out.result, "gates": out.gates, "pass": pass});
                println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                print_flat(&out.result);
                for (g, ok) in &out.gates {
                    println!("gate {g}: {}", if *ok { "pass" } else { "FAIL" });
                }
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
