//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::Instant;

use mpv_core::bounds::{dg_bound, improved_prime_bound, kernel_beta_formula};
use mpv_core::lie::{self, generator_tower_check, ihara_bracket, in_kernel, kernel_matrix, sigma_involution, v1, v2, KernelOptions};
use mpv_core::linalg::{is_prime_u64, RankMode};
use mpv_core::lincomb::{format_q, q, LinComb};
use mpv_core::numeric::{eval_composition, eval_composition_series, Evaluator};
use mpv_core::octahedral::{conj_display_coefficients, derive_conj, extract_octahedral_rows_with, Selection};
use mpv_core::relations::{assemble_standard_matrix, rows_dihedral, standard_bound, standard_system, Family, RelationRow};
use mpv_core::words::{composition_to_word, enumerate_compositions, Composition, Level, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODULAR: RankMode = RankMode::Modular { seed: 20 };

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn l(n: u32) -> Level {
    Level::new(n).unwrap()
}

fn c1() -> Verdict {
    let m = assemble_standard_matrix(3, l(4), &[Family::I, Family::II, Family::III, Family::IV]).unwrap();
    let r = m.rank(RankMode::Exact).unwrap().rank;
    let (rows, cols) = (m.rows.len(), m.basis.len());
    verdict(
        rows == 223 && cols == 125 && r == 122 && cols - r == 3,
        format!("{rows} x {cols}, exact rank {r}, kernel {}", cols - r),
    )
}

fn c2() -> Verdict {
    let b3 = standard_bound(3, l(4), &[], RankMode::Exact).unwrap().bound;
    let b4 = standard_bound(4, l(4), &[], RankMode::Exact).unwrap().bound;
    verdict(b3 == 9 && b4 == 21, format!("d(3,4) <= {b3}, d(4,4) <= {b4} (exact)"))
}

fn c3() -> Verdict {
    let rel = derive_conj().unwrap();
    let coeffs: Vec<String> = conj_display_coefficients(&rel).iter().map(format_q).collect();
    let want = ["5", "46", "-7", "-13", "13", "-1", "25", "-8", "18"];
    let rows = extract_octahedral_rows_with(3, Selection::Listed).unwrap();
    let b = standard_bound(3, l(4), &rows, RankMode::Exact).unwrap().bound;
    verdict(coeffs == want && b == 8, format!("coefficients ({}), augmented bound {b}", coeffs.join(", ")))
}

fn c4() -> Verdict {
    let base = standard_bound(4, l(4), &[], RankMode::Exact).unwrap();
    let listed = extract_octahedral_rows_with(4, Selection::Listed).unwrap();
    let aug = standard_bound(4, l(4), &listed, RankMode::Exact).unwrap();
    let gain = aug.rank.rank - base.rank.rank;
    let suff = extract_octahedral_rows_with(4, Selection::Sufficient).unwrap();
    let aug_s = standard_bound(4, l(4), &suff, RankMode::Exact).unwrap();
    let gain_s = aug_s.rank.rank - base.rank.rank;
    verdict(
        gain == 5 && aug.bound == 16,
        format!(
            "listed words: {} rows, {gain} independent, bound {}; first independent five words: +{gain_s}, bound {}",
            listed.len(),
            aug.bound,
            aug_s.bound
        ),
    )
}

fn c5() -> Verdict {
    let a = standard_bound(2, l(25), &[], MODULAR).unwrap();
    let b = standard_bound(2, l(49), &[], MODULAR).unwrap();
    verdict(
        a.bound == 116 && b.bound == 449,
        format!("d(2,25) <= {}, d(2,49) <= {} (mod {})", a.bound, b.bound, b.rank.prime.unwrap_or(0)),
    )
}

/// Coefficients of `1/P(t)` up to `t^w`.
fn invert_series(p: &[i64], w: usize) -> Vec<i64> {
    let mut out = vec![0i64; w + 1];
    out[0] = 1;
    for k in 1..=w {
        let s: i64 = (1..p.len().min(k + 1)).map(|j| p[j] * out[k - j]).sum();
        out[k] = -s;
    }
    out
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn c6() -> Verdict {
    let mut bad = Vec::new();
    for n in 1..=10u32 {
        let p: Vec<i64> = match n {
            1 => vec![1, 0, -1, -1],
            2 => vec![1, -1, -1],
            _ => {
                let phi = (1..=n).filter(|k| gcd(*k, n) == 1).count() as i64;
                let nu = (2..=n).filter(|d| n % d == 0 && is_prime_u64(*d as u64)).count() as i64;
                vec![1, -(phi / 2 + nu), nu - 1]
            }
        };
        let series = invert_series(&p, 10);
        for w in 1..=10 {
            if dg_bound(w, l(n)) as i64 != series[w] {
                bad.push(format!("D({w},{n})"));
            }
        }
    }
    let pow = (1..=10).all(|w| dg_bound(w, l(4)) == 1 << w);
    let primes = [3u64, 5, 7].iter().all(|&p| dg_bound(2, l(p as u32)) == (p + 1) * (p + 1) / 4);
    let improved = [5u64, 7, 11, 13].iter().all(|&p| {
        improved_prime_bound(p).unwrap() == (5 * p + 7) * (p + 1) / 24
            && dg_bound(2, l(p as u32)) - kernel_beta_formula(p).unwrap() == improved_prime_bound(p).unwrap()
    });
    verdict(
        bad.is_empty() && pow && primes && improved,
        format!("100 series coefficients ({} mismatches), 2^w {pow}, (p+1)^2/4 {primes}, (5p+7)(p+1)/24 {improved}", bad.len()),
    )
}

fn c7() -> Verdict {
    let s1 = sigma_involution(&v1()) == v1().scaled(&q(-1));
    let s2 = sigma_involution(&v2()) == v2().scaled(&q(-1));
    let plain = KernelOptions { octahedral: None, all_splits: false };
    let octa = KernelOptions { octahedral: Some(Selection::Listed), all_splits: false };
    let dim = |w, o| lie::dmrd_kernel_with(w, l(4), o).unwrap().len();
    let (k3, k3o, k4, k4o) = (dim(3, plain), dim(3, octa), dim(4, plain), dim(4, octa));
    let m3 = kernel_matrix(3, l(4), plain).unwrap();
    let v12 = ihara_bracket(&v1(), &v2(), 4);
    let v12_in = in_kernel(&m3, v12.poly());
    let full = KernelOptions { octahedral: Some(Selection::All), all_splits: true };
    let tower = generator_tower_check(full).unwrap();
    let d4 = &tower.degrees[3];
    let deg4 = d4.kernel_dim == 3 && d4.brackets.len() == 2 && d4.brackets_in_kernel && d4.brackets_independent;
    let pass = s1 && s2 && v12_in && (k3, k3o, k4, k4o) == (3, 2, 8, 3) && deg4;
    verdict(
        pass,
        format!(
            "sigma(v1)=-v1 {s1}, sigma(v2)=-v2 {s2}, {{v1,v2}} in (3,4) kernel {v12_in}; kernels (3,4) {k3}/{k3o}, (4,4) {k4}/{k4o}; \
             all splits + all octahedral coefficients: (4,4) kernel {}, {{v1,v3}} and {{v1,{{v1,v2}}}} inside and independent {deg4}",
            d4.kernel_dim
        ),
    )
}

fn c8() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for p in [5u32, 7, 11, 13] {
        let r = lie::verify_claim(p).unwrap();
        let h = ((p - 3) / 2) as usize;
        let ok = r.is_zero && r.distinct_terms == h * (p * p) as usize && r.unit_coefficients;
        pass &= ok;
        parts.push(format!("p={p}: zero {} terms {}", r.is_zero, r.distinct_terms));
    }
    verdict(pass, parts.join("; "))
}

fn c9() -> Verdict {
    let d5 = lie::beta_kernel(l(5), &lie::level_p_generators(5).unwrap()).unwrap().dim;
    let d7 = lie::beta_kernel(l(7), &lie::level_p_generators(7).unwrap()).unwrap().dim;
    let d25 = lie::beta_kernel(l(25), &lie::level_p2_generators(5).unwrap()).unwrap().dim;
    let d49 = lie::beta_kernel(l(49), &lie::level_p2_generators(7).unwrap()).unwrap().dim;
    let formula = d5 as u64 == kernel_beta_formula(5).unwrap() && d7 as u64 == kernel_beta_formula(7).unwrap();
    verdict(
        (d5, d7, d25, d49) == (1, 2, 5, 35) && formula,
        format!("ker beta: N=5 {d5}, N=7 {d7}, N=25 {d25}, N=49 {d49}"),
    )
}

fn c10() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    let mut check_rows = |ev: &mut Evaluator, rows: &[RelationRow]| {
        for r in rows {
            worst = worst.max(ev.combination(&r.terms).unwrap().norm());
            count += 1;
        }
    };
    for n in 1..=4u32 {
        let mut ev = Evaluator::new(l(n));
        for w in 1..=4 {
            check_rows(&mut ev, &standard_system(w, l(n), &[]).unwrap().rows);
            check_rows(&mut ev, &rows_dihedral(w, l(n)).unwrap());
        }
        if n == 4 {
            for (w, sel) in [(3, Selection::All), (4, Selection::All)] {
                check_rows(&mut ev, &extract_octahedral_rows_with(w, sel).unwrap());
            }
        }
    }
    let rel = derive_conj().unwrap();
    let lc: LinComb<Word> = rel
        .iter()
        .map(|(c, x)| {
            let (s, w) = composition_to_word(c);
            (w, x * q(s as i64))
        })
        .collect();
    let conj = Evaluator::new(l(4)).combination(&lc).unwrap().norm();
    // dual-method agreement on random convergent symbols
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pool: Vec<Composition> = (1..=4u32)
        .flat_map(|n| (1..=3).flat_map(move |w| enumerate_compositions(w, l(n))))
        .filter(|c| c.is_convergent())
        .collect();
    let mut dual: f64 = 0.0;
    for _ in 0..50 {
        let c = &pool[rng.gen_range(0..pool.len())];
        let a = eval_composition(c, 1e-14).unwrap().value;
        let b = eval_composition_series(c, 200_000).unwrap().value;
        dual = dual.max((a - b).norm());
    }
    verdict(
        worst < 1e-6 && conj < 1e-6 && dual < 1e-8,
        format!("{count} rows, max residual {worst:.1e}; conj residual {conj:.1e}; path vs series on 50 symbols {dual:.1e}"),
    )
}

fn c11() -> Verdict {
    let out = common::run_all();
    let failed: Vec<String> =
        out.iter().filter_map(|o| o.result.as_ref().err().map(|e| format!("{}: {e}", o.name))).collect();
    verdict(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} suites x {} cases", out.len(), common::CASES)
        } else {
            failed.join("; ")
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("coproduct matrix (3,4)", c1),
        ("standard bounds", c2),
        ("octahedral weight 3", c3),
        ("octahedral weight 4", c4),
        ("heavy level ranks", c5),
        ("bound formulas", c6),
        ("Lie layer", c7),
        ("level p^2 claim", c8),
        ("beta kernels", c9),
        ("numeric verification", c10),
        ("property suites", c11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|x| x == &id) {
            continue;
        }
        let t = Instant::now();
        let v = f();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name} [{:.1}s]: {}", t.elapsed().as_secs_f64(), v.detail);
        failures += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria failed", failures, if filter.is_empty() { criteria.len() } else { filter.len() });
    if failures > 0 {
        std::process::exit(1);
    }
}
