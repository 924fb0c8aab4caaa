//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed; exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylkit::acsets::{verify_ac_lemmas, Interval};
use weylkit::measure::{AcPiece, Atom};
use weylkit::nevanlinna::{multiplicity_profile, stieltjes_invert, uniform_grid, ProfileConfig};
use weylkit::sl::normal_bound_report;
use weylkit::triplet::{
    compare_extensions, direct_sum, krein_transform, regularize, Extension, SelfAdjointRelation, Verdict,
};
use weylkit::{Complex64, ComplexMatrix, HermitianMatrix, IntervalSet, NevanlinnaFunction, OperatorMeasure, SLModel};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> HermitianMatrix {
    HermitianMatrix::symmetrize(&random_matrix(rng, n, n).scale_real(scale))
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> HermitianMatrix {
    let a = random_matrix(rng, n, n);
    let p = &a.adjoint() * &a;
    let norm = p.norm_op().max(f64::MIN_POSITIVE);
    HermitianMatrix::symmetrize(&p.scale_real(scale / norm))
}

fn random_model(rng: &mut ChaCha8Rng) -> SLModel {
    let n = rng.gen_range(1..=8);
    let scale = rng.gen_range(0.5..6.0);
    SLModel::new(random_psd(rng, n, scale)).unwrap()
}

/// `diag(1, 4)` followed by `extra` random models of dimension at most 8.
fn sl_family(seed: u64, extra: usize) -> Vec<SLModel> {
    let mut rng = rng(seed);
    let mut ms = vec![SLModel::new(HermitianMatrix::from_real_diag(&[1.0, 4.0])).unwrap()];
    ms.extend((0..extra).map(|_| random_model(&mut rng)));
    ms
}

fn upper(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-10.0..10.0), 10f64.powf(rng.gen_range(-3.0..1.0)))
}

fn count_below(eigs: &[f64], t: f64) -> i32 {
    eigs.iter().filter(|&&l| l < t).count() as i32
}

fn min_im_eigenvalue(m: &ComplexMatrix) -> f64 {
    let im = HermitianMatrix::symmetrize(&m.im_part());
    im.eigh().unwrap().min_eigenvalue().unwrap_or(0.0)
}

fn i_times(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n).scale(Complex64::new(0.0, 1.0))
}

fn sl_spectrum() -> Check {
    let start = Instant::now();
    let cfg = ProfileConfig::default();
    let mut points = 0;
    for m in sl_family(1, 10) {
        let t0 = m.t0();
        let (lo, hi) = (t0 - 1.0, t0 + 10.0);
        let (spectrum, profile) = m.friedrichs_profile(lo, hi, 221, &cfg).map_err(|e| e.to_string())?;
        if spectrum != IntervalSet::single(Interval::closed(t0, hi)) {
            return Err(format!(
                "dim {}: ac spectrum {spectrum}, expected [{t0}, {hi}]",
                m.dim()
            ));
        }
        for (k, &t) in profile.grid.iter().enumerate() {
            if profile.is_excluded(k) {
                continue;
            }
            let want = count_below(m.eigenvalues(), t);
            if profile.d[k] != want {
                return Err(format!("dim {}: d({t}) = {}, expected {want}", m.dim(), profile.d[k]));
            }
            points += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("runtime {secs:.2} s"));
    }
    Ok(format!("11 models, {points} grid points, {secs:.2} s"))
}

fn mlambda() -> Check {
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = random_model(&mut rng);
        let (z, zeta) = (upper(&mut rng), upper(&mut rng));
        worst = worst.max(m.gamma_gram(z, zeta).map_err(|e| e.to_string())?.residual);
    }
    let msg = format!("max residual {worst:e}");
    if worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn closed_forms() -> Check {
    let mut rng = rng(3);
    let cfg = ProfileConfig::default();
    let (mut re_im, mut reg) = (0.0f64, 0.0f64);
    for m in sl_family(3, 10) {
        re_im = re_im.max(m.re_im_sqrt_shift().map_err(|e| e.to_string())?.residual);
        let regularized = regularize(&m.weyl()).map_err(|e| e.to_string())?.function;
        let closed = m.regularized_weyl();
        for _ in 0..20 {
            let z = upper(&mut rng);
            let a = regularized.evaluate(z).map_err(|e| e.to_string())?;
            let b = closed.evaluate(z).map_err(|e| e.to_string())?;
            reg = reg.max((&a - &b).norm_op());
        }
        let t0 = m.t0();
        let grid: Vec<f64> = uniform_grid(t0, t0 + 10.0, 111).unwrap().into_iter().skip(1).collect();
        let via_bk = krein_transform(&m.regularized_weyl(), &m.krein_parameter()).map_err(|e| e.to_string())?;
        let p1 = multiplicity_profile(&via_bk, &grid, &cfg).map_err(|e| e.to_string())?;
        let p2 = multiplicity_profile(&m.krein_weyl(), &grid, &cfg).map_err(|e| e.to_string())?;
        for (k, &t) in grid.iter().enumerate() {
            if p1.is_excluded(k) || p2.is_excluded(k) {
                continue;
            }
            if p1.d[k] != p2.d[k] {
                return Err(format!(
                    "dim {}: Krein profiles differ at t = {t}: {} vs {}",
                    m.dim(),
                    p1.d[k],
                    p2.d[k]
                ));
            }
        }
    }
    let msg = format!("re/im residual {re_im:e}, regularization gap {reg:e}, Krein profiles agree");
    if re_im <= 1e-10 && reg <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn comparisons() -> Check {
    let mut rng = rng(4);
    let cfg = ProfileConfig::default();
    let mut inconclusive = 0;
    let mut verdicts = Vec::new();
    for _ in 0..10 {
        let m = random_model(&mut rng);
        let b = random_hermitian(&mut rng, m.dim(), 2.0);
        let t0 = m.t0();
        let grid = uniform_grid(t0 - 1.0, t0 + 10.0, 111).unwrap();
        let v = compare_extensions(&m.weyl(), &Extension::Reference, &Extension::Operator(b), &grid, &cfg)
            .map_err(|e| e.to_string())?;
        inconclusive += usize::from(v.verdict == Verdict::Inconclusive);
        if v.verdict != Verdict::Equivalent {
            return Err(format!("dim {}: verdict {}", m.dim(), v.verdict.as_str()));
        }
    }
    for k in 0..5 {
        let n = rng.gen_range(2..=6);
        let m = SLModel::new(random_psd(&mut rng, n, 3.0)).unwrap();
        let r = rng.gen_range(1..n);
        let q = random_matrix(&mut rng, n, n);
        let basis = orthonormal_columns(&q, r);
        let theta = SelfAdjointRelation::new(basis, random_hermitian(&mut rng, r, 1.0)).map_err(|e| e.to_string())?;
        let t0 = m.t0();
        let grid = uniform_grid(t0 - 1.0, t0 + 10.0, 111).unwrap();
        let v = compare_extensions(
            &m.weyl(),
            &Extension::Reference,
            &Extension::Relation(theta),
            &grid,
            &cfg,
        )
        .map_err(|e| format!("relation {k}: {e}"))?;
        inconclusive += usize::from(v.verdict == Verdict::Inconclusive);
        verdicts.push(v.verdict.as_str());
    }
    if inconclusive > 0 {
        return Err(format!("{inconclusive} inconclusive verdicts"));
    }
    Ok(format!("10 operator pairs equivalent, relation verdicts {verdicts:?}"))
}

/// First `r` columns of `q` after modified Gram-Schmidt.
fn orthonormal_columns(q: &ComplexMatrix, r: usize) -> ComplexMatrix {
    let n = q.rows();
    let mut u = q.submatrix(0..n, 0..r);
    for j in 0..r {
        for k in 0..j {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += u[(i, k)].conj() * u[(i, j)];
            }
            for i in 0..n {
                let uik = u[(i, k)];
                u[(i, j)] -= uik * dot;
            }
        }
        let norm: f64 = (0..n).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            u[(i, j)] /= norm;
        }
    }
    u
}

fn normal_bound() -> Check {
    let grid = uniform_grid(-10.0, 10.0, 50).unwrap();
    let ys = [1.0, 0.1, 0.01];
    let mut models = vec![("T = 0".to_string(), SLModel::new(HermitianMatrix::zeros(1)).unwrap())];
    models.extend(
        sl_family(5, 10)
            .into_iter()
            .enumerate()
            .map(|(k, m)| (format!("model {k} (dim {})", m.dim()), m)),
    );
    let mut lines = Vec::new();
    let mut total = 0;
    for (name, m) in &models {
        let r = normal_bound_report(&m.weyl(), &grid, &ys).map_err(|e| e.to_string())?;
        total += r.violations;
        if r.violations > 0 {
            lines.push(format!(
                "{name}: {} violations, min slack {:.4}",
                r.violations, r.min_slack
            ));
        }
    }
    if total == 0 {
        Ok(format!("{} models, no violations", models.len()))
    } else {
        Err(format!("{total} violations; {}", lines.join("; ")))
    }
}

fn stieltjes() -> Check {
    let diag = HermitianMatrix::from_real_diag;
    let truths = [
        OperatorMeasure::new(
            2,
            vec![],
            vec![
                AcPiece {
                    a: 0.0,
                    b: 1.0,
                    density: diag(&[1.0, 0.5]),
                },
                AcPiece {
                    a: 1.0,
                    b: 2.0,
                    density: diag(&[2.0, 0.0]),
                },
            ],
        ),
        OperatorMeasure::new(
            1,
            vec![],
            vec![
                AcPiece {
                    a: -1.0,
                    b: 0.5,
                    density: diag(&[0.25]),
                },
                AcPiece {
                    a: 0.5,
                    b: 1.5,
                    density: diag(&[3.0]),
                },
            ],
        ),
    ];
    let mut cfg = ProfileConfig::default();
    cfg.limit.y0 = 1e-3;
    let mut worst = 0.0f64;
    for truth in truths {
        let truth = truth.map_err(|e| e.to_string())?;
        let n = truth.dim();
        let zero = HermitianMatrix::zeros(n);
        let f = NevanlinnaFunction::integral(zero.clone(), zero, truth.clone()).map_err(|e| e.to_string())?;
        let edges = uniform_grid(-1.5, 2.5, 401).unwrap();
        let inv = stieltjes_invert(&f, &edges, &cfg).map_err(|e| e.to_string())?;
        let (mut err, mut mass) = (0.0, 0.0);
        for p in inv.measure.ac_pieces() {
            let mid = 0.5 * (p.a + p.b);
            let exact = truth
                .ac_pieces()
                .iter()
                .find(|q| q.a <= mid && mid < q.b)
                .map(|q| q.density.as_matrix().clone())
                .unwrap_or_else(|| ComplexMatrix::zeros(n, n));
            let h = p.b - p.a;
            err += (p.density.as_matrix() - &exact).norm_fro() * h;
            mass += exact.norm_fro() * h;
        }
        for &k in &inv.omitted {
            let mid = 0.5 * (edges[k] + edges[k + 1]);
            if let Some(q) = truth.ac_pieces().iter().find(|q| q.a <= mid && mid < q.b) {
                err += q.density.as_matrix().norm_fro() * (edges[k + 1] - edges[k]);
            }
        }
        worst = worst.max(err / mass);
    }
    let msg = format!("max relative L1 error {worst:e}");
    if worst < 1e-2 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn direct_sums() -> Check {
    let mut rng = rng(7);
    let grid = uniform_grid(-1.0, 6.0, 71).unwrap();
    let cfg = ProfileConfig::default();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..10 {
        let terms = rng.gen_range(1..=8);
        let fs: Vec<_> = (0..terms)
            .map(|_| {
                let n = rng.gen_range(1..=2);
                let t = random_psd(&mut rng, n, 5.0);
                if rng.gen_bool(0.5) {
                    NevanlinnaFunction::sqrt(t).unwrap()
                } else {
                    SLModel::new(t).unwrap().neumann_weyl()
                }
            })
            .collect();
        let sum = direct_sum(&fs, true).map_err(|e| e.to_string())?;
        let at_i = sum.evaluate(Complex64::new(0.0, 1.0)).map_err(|e| e.to_string())?;
        worst = worst.max((&at_i - &i_times(sum.dim())).norm_op());
        let whole = multiplicity_profile(&sum, &grid, &cfg).map_err(|e| e.to_string())?;
        let parts = fs
            .iter()
            .map(|f| multiplicity_profile(f, &grid, &cfg))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        for (k, &t) in grid.iter().enumerate() {
            if !whole.is_informative(k) || parts.iter().any(|p| !p.is_informative(k)) {
                continue;
            }
            let total: i32 = parts.iter().map(|p| p.d[k]).sum();
            if whole.d[k] != total {
                return Err(format!(
                    "{terms} terms: d({t}) = {} but parts sum to {total}",
                    whole.d[k]
                ));
            }
            checked += 1;
        }
    }
    let msg = format!("max |F(i) - iI| {worst:e}, {checked} additive points");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_set(rng: &mut ChaCha8Rng) -> IntervalSet {
    let n = rng.gen_range(0..=20);
    IntervalSet::new((0..n).map(|_| {
        let a = rng.gen_range(-40i32..40) as f64 / 4.0;
        let len = rng.gen_range(0i32..8) as f64 / 4.0;
        if len == 0.0 {
            Interval::point(a)
        } else {
            Interval::new(a, a + len, rng.gen(), rng.gen())
        }
    }))
}

fn ac_lemmas() -> Check {
    let mut rng = rng(8);
    for k in 0..500 {
        let set = random_set(&mut rng);
        let parts: Vec<_> = (0..rng.gen_range(1..=5)).map(|_| random_set(&mut rng)).collect();
        let r = verify_ac_lemmas(&set, &parts);
        if !r.passed() {
            return Err(format!(
                "family {k}: remainder {} union rule {}",
                r.remainder, r.union_rule
            ));
        }
    }
    Ok("500 families".into())
}

/// One instance of every node family.
fn zoo() -> Vec<(&'static str, NevanlinnaFunction)> {
    let mut rng = rng(9);
    let diag = HermitianMatrix::from_real_diag;
    let t = random_psd(&mut rng, 3, 4.0);
    let sqrt = NevanlinnaFunction::sqrt(t.clone()).unwrap();
    let measure = OperatorMeasure::new(
        2,
        vec![
            Atom {
                t: 0.5,
                weight: diag(&[1.0, 0.0]),
            },
            Atom {
                t: 3.0,
                weight: diag(&[0.2, 0.7]),
            },
        ],
        vec![
            AcPiece {
                a: -2.0,
                b: 0.0,
                density: diag(&[0.3, 1.0]),
            },
            AcPiece {
                a: 1.0,
                b: 2.5,
                density: diag(&[1.0, 0.4]),
            },
        ],
    )
    .unwrap();
    let integral = NevanlinnaFunction::integral(diag(&[0.5, -1.0]), diag(&[0.1, 0.0]), measure).unwrap();
    let sl = SLModel::new(t.clone()).unwrap();
    let r = random_matrix(&mut rng, 3, 3);
    let d = random_matrix(&mut rng, 3, 2);
    vec![
        ("sqrt", sqrt.clone()),
        ("reg_sqrt", NevanlinnaFunction::regularized_sqrt(t.clone()).unwrap()),
        ("krein_sl", NevanlinnaFunction::krein_sl(t.clone()).unwrap()),
        ("neumann_sl", NevanlinnaFunction::neumann_sl(t.clone()).unwrap()),
        ("sl", sl.weyl()),
        ("constant_i", NevanlinnaFunction::constant_i(2.0).unwrap()),
        ("integral", integral.clone()),
        (
            "krein",
            NevanlinnaFunction::krein(random_hermitian(&mut rng, 3, 2.0), sqrt.clone()).unwrap(),
        ),
        (
            "conj",
            NevanlinnaFunction::conjugation(r.clone(), random_hermitian(&mut rng, 3, 1.0), sqrt.clone()).unwrap(),
        ),
        ("sandwich", NevanlinnaFunction::sandwich(r, sqrt.clone()).unwrap()),
        ("compress", NevanlinnaFunction::compress(d, sqrt.clone()).unwrap()),
        ("sum", NevanlinnaFunction::direct_sum(vec![sqrt, integral]).unwrap()),
    ]
}

fn herglotz() -> Check {
    let mut rng = rng(10);
    let (mut min_im, mut max_sym) = (f64::INFINITY, 0.0f64);
    let nodes = zoo();
    for (name, f) in &nodes {
        for _ in 0..200 {
            let z = upper(&mut rng);
            let v = f.evaluate(z).map_err(|e| format!("{name} at {z}: {e}"))?;
            let m = min_im_eigenvalue(&v);
            let s = f.symmetry_residual(z).map_err(|e| format!("{name} at {z}: {e}"))?;
            if m < -1e-10 || s > 1e-10 {
                return Err(format!(
                    "{name} at {z}: min Im eigenvalue {m:e}, symmetry residual {s:e}"
                ));
            }
            min_im = min_im.min(m);
            max_sym = max_sym.max(s);
        }
    }
    Ok(format!(
        "{} nodes, min Im eigenvalue {min_im:e}, max symmetry residual {max_sym:e}",
        nodes.len()
    ))
}

fn run_corpus(threads: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        for format in ["json", "csv"] {
            let o = Command::new(env!("CARGO_BIN_EXE_weylkit"))
                .args(["run", p.to_str().unwrap(), "--format", format])
                .env("WEYLKIT_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            if o.stdout.is_empty() {
                return Err(format!("{}: no output", p.display()));
            }
            out.push((
                format!("{} ({format})", p.file_name().unwrap().to_string_lossy()),
                o.stdout,
            ));
        }
    }
    Ok(out)
}

fn determinism() -> Check {
    let base = run_corpus("1")?;
    for threads in ["1", "4", "8"] {
        let other = run_corpus(threads)?;
        for ((name, a), (_, b)) in base.iter().zip(&other) {
            if a != b {
                return Err(format!("{name} differs with WEYLKIT_THREADS={threads}"));
            }
        }
    }
    Ok(format!("{} reports identical over 4 runs", base.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("sturm-liouville spectrum", sl_spectrum),
        ("gamma identity", mlambda),
        ("closed forms", closed_forms),
        ("extension comparison", comparisons),
        ("normal-function bound", normal_bound),
        ("stieltjes inversion", stieltjes),
        ("direct sums", direct_sums),
        ("ac-closure lemmas", ac_lemmas),
        ("herglotz and symmetry", herglotz),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
