//! Acceptance gate: eight criteria, one PASS/FAIL line each. Exits nonzero
//! if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use weakschmidt::bell::{decompose, max_entanglement_residual, weyl_basis, BellBasis};
use weakschmidt::hadamard::{
    equivalent, family_n4, fourier, is_hadamard, random_dressing, Equivalence, HadamardCandidate,
};
use weakschmidt::numerics::random::{
    random_density_of_rank, random_hermitian, random_unitary, rng_from_seed, with_singular_values,
};
use weakschmidt::numerics::{distance_up_to_phase, eigh, svd};
use weakschmidt::schmidt_correlated::{
    all_ensembles_property_check, detect, is_separable_sc, orthogonality_check, phase_ensemble,
    phase_separability, random_schmidt_correlated, random_separable_schmidt_correlated,
    DiagonalEnsemble, SchmidtCorrelatedForm,
};
use weakschmidt::states::{is_ppt, mix, spectral_ensemble};
use weakschmidt::weak_svd::{check_strong, check_weak, diagonalize, residual};
use weakschmidt::{ComplexMatrix, DensityMatrix, Ensemble, PureState, Tolerance, C64};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn omega() -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU / 3.0)
}

fn w(p: u32) -> C64 {
    omega().powu(p % 3)
}

// ---------------------------------------------------------------- 1 and 2

/// The three amplitude vectors of the worked example, written out block by
/// block: blocks are the rows of `F_3` cycled by `k`.
fn worked_example_states() -> Vec<PureState> {
    let rows = [[0u32, 0, 0], [0, 1, 2], [0, 2, 1]];
    (0..3)
        .map(|k| {
            let mut amp = Vec::with_capacity(9);
            for b in 0..3 {
                for &e in &rows[(b + k) % 3] {
                    amp.push(w(e) / 3.0);
                }
            }
            PureState::new(3, amp).unwrap()
        })
        .collect()
}

/// Is there a permutation `π` and phases `c_j` with `α_{π(j),k} = c_j φ_{j,k}`?
fn matches_up_to_gauge(alpha: &ComplexMatrix, phi: &ComplexMatrix, eps: f64) -> bool {
    let n = alpha.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ok = (0..n).all(|j| {
            let r = perm[j];
            let c = alpha[(r, 0)] / phi[(j, 0)];
            (c.norm() - 1.0).abs() <= eps && (0..alpha.cols()).all(|k| (alpha[(r, k)] - c * phi[(j, k)]).norm() <= eps)
        });
        if ok {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn criterion_1() -> Outcome {
    let t = Tolerance::default();
    let states = worked_example_states();
    let mats: Vec<ComplexMatrix> = states.iter().map(weakschmidt::states::matrix_rep).collect();
    ensure(!check_strong(&mats, &t).unwrap(), || "check_strong accepted the family".into())?;
    ensure(check_weak(&mats, &t).unwrap(), || "check_weak rejected the family".into())?;
    // φ_k = (1/√3)(1, ω^{k-1}, ω^{2(k-1)}) on the diagonal
    let phi = ComplexMatrix::from_fn(3, 3, |j, k| w((j * k) as u32) / 3f64.sqrt());
    // the stated witness: U = (F_3/√3)†, V = I
    let u0 = fourier(3).into_matrix().scale_real(1.0 / 3f64.sqrt()).adjoint();
    for (k, a) in mats.iter().enumerate() {
        let d = &u0 * a;
        let target = ComplexMatrix::from_diag(&phi.column(k));
        ensure((&d - &target).frobenius_norm() <= 1e-12, || format!("stated witness misses state {k}"))?;
    }
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let r = diagonalize(&mats, &t, seed).map_err(|e| e.to_string())?;
        let res = residual(&mats, &r).unwrap();
        worst = worst.max(res);
        ensure(res <= 1e-9, || format!("seed {seed}: residual {res:e}"))?;
        ensure(matches_up_to_gauge(&r.alpha_table(), &phi, 1e-9), || {
            format!("seed {seed}: diagonals differ from the phi pattern")
        })?;
    }
    for probs in [vec![1.0 / 3.0; 3], vec![0.5, 0.3, 0.2]] {
        let rho = mix(&Ensemble::new(probs, states.clone()).unwrap());
        ensure(detect(&rho, &t).unwrap().is_some(), || "mixture not detected".into())?;
    }
    Ok(format!("max residual {worst:.1e} over 10 seeds"))
}

fn criterion_2() -> Outcome {
    let t = Tolerance::default();
    let fam = vec![
        ComplexMatrix::from_diag(&[w(0), w(1), w(2)]),
        ComplexMatrix::from_diag(&[w(0), w(2), w(1)]),
    ];
    ensure(!check_strong(&fam, &t).unwrap(), || "check_strong accepted".into())?;
    ensure(check_weak(&fam, &t).unwrap(), || "check_weak rejected".into())?;
    Ok("strong false, weak true".into())
}

// ---------------------------------------------------------------- 3 and 4

struct Detected {
    rho: DensityMatrix,
    form: SchmidtCorrelatedForm,
}

fn sc_case(i: u64) -> (usize, usize) {
    let n = 2 + (i % 7) as usize;
    let rank = 1 + ((i / 7) as usize) % n;
    (n, rank)
}

fn criterion_3_cases(t: &Tolerance) -> Result<(Vec<Detected>, String), String> {
    let mut detected = Vec::new();
    let mut rng = rng_from_seed(3_000);
    for i in 0..200u64 {
        let (n, rank) = sc_case(i);
        let (rho, _) = random_schmidt_correlated(n, rank, i).map_err(|e| e.to_string())?;
        let rho = rho
            .conjugate_local(&random_unitary(n, &mut rng), &random_unitary(n, &mut rng))
            .map_err(|e| e.to_string())?;
        let form = detect(&rho, t)
            .map_err(|e| format!("seed {i} (n={n}, rank={rank}): {e}"))?
            .ok_or_else(|| format!("seed {i} (n={n}, rank={rank}) missed"))?;
        let all = all_ensembles_property_check(&rho, 20, i, t).map_err(|e| e.to_string())?;
        ensure(all, || format!("seed {i}: a re-mixed ensemble failed"))?;
        detected.push(Detected { rho, form });
    }
    let mut rejected = 0;
    for i in 0..200u64 {
        let n = 2 + (i % 7) as usize;
        let mut rng = rng_from_seed(10_000 + i);
        let rank = rng.random_range(2..=n * n);
        let rho = DensityMatrix::new(n, random_density_of_rank(n * n, rank, &mut rng), t).unwrap();
        match detect(&rho, t) {
            Ok(None) => rejected += 1,
            Ok(Some(_)) => return Err(format!("dense seed {i} (n={n}, rank={rank}) accepted")),
            Err(e) => return Err(format!("dense seed {i}: {e}")),
        }
    }
    Ok((detected, format!("200/200 detected, 4000 ensembles weak, {rejected}/200 dense rejected")))
}

fn criterion_4(t: &Tolerance, cases: &[Detected]) -> Outcome {
    let mut entangled = 0;
    let mut separable_forms = Vec::new();
    for i in 0..50u64 {
        let (n, rank) = sc_case(i);
        let (rho, _) = random_separable_schmidt_correlated(n, rank, 500 + i).map_err(|e| e.to_string())?;
        let form = detect(&rho, t).map_err(|e| e.to_string())?.ok_or("separable form missed")?;
        separable_forms.push(Detected { rho, form });
    }
    for (idx, d) in cases.iter().chain(&separable_forms).enumerate() {
        let sc = is_separable_sc(&d.form, t);
        let ppt = is_ppt(&d.rho, t).map_err(|e| e.to_string())?;
        let spectral = spectral_ensemble(&d.rho, t).map_err(|e| e.to_string())?;
        let orth = orthogonality_check(&spectral, &d.form.u, &d.form.v, t).map_err(|e| e.to_string())?;
        ensure(sc.separable == ppt.ppt && ppt.ppt == orth, || {
            format!("case {idx}: coherence {} ppt {} orthogonality {}", sc.separable, ppt.ppt, orth)
        })?;
        if let Some(w) = sc.witness {
            entangled += 1;
            let c = d.form.c[(w.j, w.l)].norm();
            ensure(ppt.min_eigenvalue < 0.0, || format!("case {idx}: no negative eigenvalue"))?;
            ensure(w.minor <= -c * c + 1e-9, || format!("case {idx}: minor {} vs -|C|^2 {}", w.minor, -c * c))?;
        }
    }
    let total = cases.len() + separable_forms.len();
    Ok(format!("{total} forms agree ({entangled} entangled, {} separable)", total - entangled))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let t = Tolerance::default();
    let mut agree = 0;
    for i in 0..100u64 {
        let mut rng = rng_from_seed(5_000 + i);
        let (n, h) = if i % 4 == 3 {
            (4, family_n4(rng.random_range(0.0..std::f64::consts::TAU)).into_matrix())
        } else {
            let n = 2 + (i % 7) as usize;
            (n, fourier(n).into_matrix())
        };
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
        let u = random_unitary(n, &mut rng);
        let v = random_unitary(n, &mut rng);

        let ens = phase_ensemble(&a, &h, &u, &v).map_err(|e| e.to_string())?;
        let ppt = is_ppt(&mix(&ens), &t).map_err(|e| e.to_string())?;
        ensure(ppt.min_eigenvalue >= -1e-9, || format!("case {i}: min eigenvalue {:e}", ppt.min_eigenvalue))?;
        let verdict = phase_separability(&DiagonalEnsemble::extract(&ens, &u, &v).map_err(|e| e.to_string())?, &t);
        ensure(verdict.applicable, || format!("case {i}: not applicable ({:?})", verdict.reason))?;
        ensure(verdict.separable == Some(ppt.ppt), || format!("case {i}: phase test disagrees with PPT"))?;
        agree += 1;

        let mut bent = h.clone();
        let (j, k) = (rng.random_range(0..n), rng.random_range(0..n));
        let delta = rng.random_range(0.1..=1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        bent[(j, k)] *= C64::from_polar(1.0, delta);
        let ens = phase_ensemble(&a, &bent, &u, &v).map_err(|e| e.to_string())?;
        let ppt = is_ppt(&mix(&ens), &t).map_err(|e| e.to_string())?;
        ensure(!ppt.ppt && ppt.min_eigenvalue < -1e-9, || {
            format!("case {i}: perturbed ({j},{k}) by {delta:.3} still PPT")
        })?;
        let verdict = phase_separability(&DiagonalEnsemble::extract(&ens, &u, &v).map_err(|e| e.to_string())?, &t);
        ensure(verdict.separable == Some(ppt.ppt), || format!("case {i}: perturbed phase test disagrees"))?;
        agree += 1;
    }
    Ok(format!("{agree}/200 verdicts agree with PPT"))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let t = Tolerance::default();
    let strict = Tolerance::new(1e-10).unwrap();
    for n in 1..=16 {
        ensure(is_hadamard(fourier(n).matrix(), &strict).unwrap(), || format!("F_{n} rejected"))?;
    }
    for i in 0..100 {
        let a = std::f64::consts::TAU * i as f64 / 100.0;
        ensure(is_hadamard(family_n4(a).matrix(), &t).unwrap(), || format!("family at {a} rejected"))?;
    }
    let f3 = fourier(3);
    let mut rng = rng_from_seed(6);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (g, _) = random_dressing(&f3, &mut rng);
        match equivalent(&g, &f3, &t).map_err(|e| e.to_string())? {
            Equivalence::Yes(wit) => {
                let r = wit.residual(g.matrix(), f3.matrix());
                worst = worst.max(r);
                ensure(r <= 1e-8, || format!("dressing {i}: witness residual {r:e}"))?;
            }
            other => return Err(format!("dressing {i}: {other:?}")),
        }
    }
    let verdict = equivalent(&family_n4(0.3), &family_n4(0.9), &t).map_err(|e| e.to_string())?;
    ensure(verdict == Equivalence::No, || format!("family members: {verdict:?}"))?;
    Ok(format!("F_1..F_16, 100 grid points, 100 dressings (worst witness {worst:.1e}), NO at order 4"))
}

// ---------------------------------------------------------------- 7

fn random_hadamard(n: usize, rng: &mut impl Rng) -> HadamardCandidate {
    let base = if n == 4 && rng.random_bool(0.5) {
        family_n4(rng.random_range(0.0..std::f64::consts::TAU))
    } else {
        fourier(n)
    };
    random_dressing(&base, rng).0
}

fn criterion_7() -> Outcome {
    let t = Tolerance::default();
    let mut rng = rng_from_seed(7);
    let (mut gram, mut ent): (f64, f64) = (0.0, 0.0);
    for n in 2..=8 {
        for _ in 0..3 {
            let hs = (0..n).map(|_| random_hadamard(n, &mut rng)).collect();
            let b = BellBasis::new(hs, &t).map_err(|e| e.to_string())?;
            gram = gram.max(b.gram_residual());
            ent = ent.max(b.states().iter().map(max_entanglement_residual).fold(0.0, f64::max));
        }
    }
    ensure(gram <= 1e-9, || format!("Gram residual {gram:e}"))?;
    ensure(ent <= 1e-9, || format!("reduced-state residual {ent:e}"))?;

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let c = |x: f64| C64::new(x, 0.0);
    let standard = [
        vec![c(r), z, z, c(r)],
        vec![c(r), z, z, c(-r)],
        vec![z, c(r), c(r), z],
        vec![z, c(r), c(-r), z],
    ];
    let weyl = weyl_basis(2);
    for (psi, e) in weyl.states().iter().zip(&standard) {
        ensure(distance_up_to_phase(psi.amplitudes(), e) <= 1e-12, || "Weyl basis differs from Bell states".into())?;
    }

    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 2 + i % 4;
        let hs = (0..n).map(|_| random_hadamard(n, &mut rng)).collect();
        let b = BellBasis::new(hs, &t).map_err(|e| e.to_string())?;
        let rank = rng.random_range(1..=n * n);
        let rho = DensityMatrix::new(n, random_density_of_rank(n * n, rank, &mut rng), &t).unwrap();
        let d = decompose(&rho, &b).map_err(|e| e.to_string())?;
        worst = worst.max((&d.reconstruct(&b) - rho.matrix()).frobenius_norm());
    }
    ensure(worst <= 1e-8, || format!("round trip residual {worst:e}"))?;
    Ok(format!("Gram {gram:.1e}, entanglement {ent:.1e}, round trip {worst:.1e}"))
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let t = Tolerance::default();
    let (mut we, mut ws): (f64, f64) = (0.0, 0.0);
    for seed in 0..1000u64 {
        let mut rng = rng_from_seed(80_000 + seed);
        let n = 1 + (seed % 12) as usize;
        let h = random_hermitian(n, &mut rng);
        let e = eigh(&h, &t).map_err(|e| format!("eigh seed {seed}: {e}"))?;
        we = we.max((&e.reconstruct() - &h).frobenius_norm() / h.frobenius_norm());

        let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let a = with_singular_values(&s, &mut rng);
        let d = svd(&a, &t).map_err(|e| format!("svd seed {seed}: {e}"))?;
        let back = &(&d.u.adjoint() * &ComplexMatrix::from_real_diag(&d.s)) * &d.v.conj();
        ws = ws.max((&back - &a).frobenius_norm() / a.frobenius_norm());
    }
    ensure(we <= 1e-10, || format!("eigh residual {we:e}"))?;
    ensure(ws <= 1e-10, || format!("svd residual {ws:e}"))?;
    Ok(format!("eigh {we:.1e}, svd {ws:.1e} relative"))
}

// ----------------------------------------------------------------

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let start = Instant::now();
    let t7 = Tolerance::new(1e-7).unwrap();
    let results: Vec<(usize, &str, Outcome)> = std::thread::scope(|scope| {
        let c34 = scope.spawn(move || {
            let mut out = Vec::new();
            match catch_unwind(AssertUnwindSafe(|| criterion_3_cases(&t7))) {
                Ok(Ok((cases, msg))) => {
                    out.push(Ok(msg));
                    out.push(guarded(|| criterion_4(&t7, &cases)));
                }
                Ok(Err(e)) => {
                    out.push(Err(e));
                    out.push(Err("skipped: criterion 3 produced no forms".into()));
                }
                Err(_) => {
                    out.push(Err("panicked".into()));
                    out.push(Err("skipped: criterion 3 panicked".into()));
                }
            }
            out
        });
        let others: Vec<_> = [
            criterion_1 as fn() -> Outcome,
            criterion_2,
            criterion_5,
            criterion_6,
            criterion_7,
            criterion_8,
        ]
        .into_iter()
        .map(|f| scope.spawn(move || guarded(f)))
        .collect();
        let mut others: Vec<Outcome> = others.into_iter().map(|h| h.join().unwrap()).collect();
        let mut c34 = c34.join().unwrap();
        let c4 = c34.pop().unwrap();
        let c3 = c34.pop().unwrap();
        let c8 = others.pop().unwrap();
        let c7 = others.pop().unwrap();
        let c6 = others.pop().unwrap();
        let c5 = others.pop().unwrap();
        let c2 = others.pop().unwrap();
        let c1 = others.pop().unwrap();
        vec![
            (1, "worked example in weak SVD", c1),
            (2, "complex diagonal pair", c2),
            (3, "Schmidt-correlated detection", c3),
            (4, "separability criteria agree", c4),
            (5, "phase matrix criterion", c5),
            (6, "complex Hadamard suite", c6),
            (7, "generalized Bell bases", c7),
            (8, "eigh and svd floor", c8),
        ]
    });
    let mut failed = 0;
    for (i, name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {i} ({name}): PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {i} ({name}): FAIL  {msg}");
            }
        }
    }
    println!("acceptance: {}/8 passed in {:.1}s", 8 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
