//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line to
//! stderr (bypassing output capture) and fails if the criterion is not met,
//! including its runtime budget.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use rayon::prelude::*;
use tenloc::dominance::*;
use tenloc::eig::*;
use tenloc::regions::*;
use tenloc::tensor::{Block, Side};
use tenloc::{SubsetPartition, Tensor};

fn report(n: u32, name: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > limit => Err(format!("{detail}; over budget of {limit:?}")),
        other => other,
    };
    let (verdict, detail) = match &outcome {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    let line = format!("criterion {n}: {verdict} {name} ({elapsed:.2?}): {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(d) = outcome {
        panic!("criterion {n} failed: {d}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn part(subset: &[usize], n: usize) -> SubsetPartition {
    SubsetPartition::new(subset.to_vec(), n).unwrap()
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

#[test]
fn criterion_1_example_golden_values() {
    report(1, "example golden values", Duration::from_secs(1), || {
        let t = example41();
        let close = |got: f64, want: f64, what: &str| {
            ensure((got - want).abs() <= 1e-12, || format!("{what} = {got}, expected {want}"))
        };
        close(t.row_radius(0).unwrap(), 3.8, "r_1")?;
        close(t.row_radius(1).unwrap(), 4.5, "r_2")?;
        close(t.row_radius(2).unwrap(), 3.5, "r_3")?;
        close(t.deleted_row_radius(2, 0).unwrap(), 3.4, "r_3^1")?;
        let s = part(&[0, 1], 3);
        close(t.split_radius(0, &s, Side::Complement, Block::Inside).unwrap(), 0.1, "r_1 in S'")?;
        close(t.split_radius(1, &s, Side::Complement, Block::Inside).unwrap(), 0.2, "r_2 in S'")?;

        let qd = is_quasi_doubly_dd(&t, false).unwrap().witness.ok_or("no QD witness")?;
        let printed = [
            (qd.lhs, "-0.5000"),
            (qd.rhs, "0.3800"),
        ];
        let mut pairs = printed.to_vec();
        for (ineq, l, r) in [
            (Inequality::SplitComplement { i: 0, j: 2 }, "4.2900", "0.3500"),
            (Inequality::SplitComplement { i: 1, j: 2 }, "5.6100", "0.7000"),
        ] {
            let (lhs, rhs) = ineq.evaluate(&t, Some(&s)).unwrap();
            pairs.push((lhs, l));
            pairs.push((rhs, r));
        }
        for (v, want) in &pairs {
            ensure(f4(*v) == *want, || format!("printed {} expected {want}", f4(*v)))?;
        }

        // the split of r_3 over {1,2} by definition is 1.7 / 1.8, not the
        // 1.0 / 2.5 implied by the printed products; the verdict is unchanged
        let (inside, outside) = t.split_radii(2, &s, Side::Subset).unwrap();
        close(inside, 1.7, "r_3 in S")?;
        close(outside, 1.8, "r_3 out S")?;
        let mut first_side = Vec::new();
        for (j_pair, l, r) in [(0, 7.5, 6.46), (1, 9.0, 7.65)] {
            let (lhs, rhs) = Inequality::SplitSubset { i: j_pair, j: 2 }.evaluate(&t, Some(&s)).unwrap();
            close(lhs, l, "S-side lhs")?;
            close(rhs, r, "S-side rhs")?;
            ensure(lhs > rhs, || format!("{lhs} > {rhs} fails"))?;
            first_side.push(format!("{} > {}", f4(lhs), f4(rhs)));
        }
        Ok(format!(
            "radii 3.8/4.5/3.5, r_3^1 = 3.4, printed values match; S-side products {}",
            first_side.join(", ")
        ))
    });
}

#[test]
fn criterion_2_example_classification() {
    report(2, "example classification and oracle cross-check", Duration::from_secs(30), || {
        let t = example41();
        let s = part(&[0, 1], 3);
        let sqd0 = is_s_qdsdd(&t, &s, false).unwrap();
        ensure(!sqd0.holds, || "example is S-QDSDD0".into())?;
        ensure(is_s_sdd(&t, &s, true).unwrap().holds, || "example is not S-SDD".into())?;
        let report = certify_definiteness(&t, &PartitionChoice::Explicit(vec![s.clone()]));
        ensure(report.conclusion == Conclusion::PositiveDefinite, || {
            format!("conclusion {}", report.conclusion)
        })?;
        let cert = report.certificate().ok_or("no certificate")?;
        ensure(cert.class == DominanceClass::SSdd, || format!("certified by {}", cert.class))?;

        let smallest = shifted_power_extreme(&t, &PowerOptions::default()).unwrap();
        ensure(smallest.lambda.re > 0.0 && smallest.residual < 1e-10, || {
            format!("smallest H-eigenvalue {} (residual {:e})", smallest.lambda, smallest.residual)
        })?;
        let pairs = newton_eigenpairs(&t, &NewtonOptions::default());
        ensure(!pairs.is_empty(), || "no Newton eigenpairs".into())?;
        let min_re = pairs.iter().map(|p| p.lambda.re).fold(f64::INFINITY, f64::min);
        ensure(min_re > 0.0, || format!("Newton eigenvalue with real part {min_re}"))?;
        Ok(format!(
            "not S-QDSDD0, S-SDD for S = {{1,2}}, positive_definite; smallest H-eigenvalue {:.6}, \
             {} Newton eigenvalues with min real part {:.6}",
            smallest.lambda.re,
            pairs.len(),
            min_re
        ))
    });
}

#[test]
fn criterion_3_inclusion_chain() {
    report(3, "inclusion chain on random tensors", Duration::from_secs(300), || {
        let shapes: Vec<(usize, usize)> = [3, 4].iter().flat_map(|&m| [2, 3, 4].map(|n| (m, n))).collect();
        let cases: Vec<(usize, bool)> = (0..250).map(|k| (k, k >= 200)).collect();
        let results: Vec<Result<usize, String>> = cases
            .par_iter()
            .map(|&(k, symmetric)| {
                let (order, n) = shapes[k % shapes.len()];
                let mut r = rng(3_000 + k as u64);
                let t = if symmetric {
                    symmetric_gaussian(order, n, &mut r)
                } else {
                    dense_gaussian(order, n, &mut r)
                };
                let mut points = 0;
                for p in all_partitions(n) {
                    let rep = verify_inclusion_chain(&t, &p, 10_000, k as u64).map_err(|e| e.to_string())?;
                    if let Some(v) = rep.violations.first() {
                        return Err(format!("tensor {k}, S = {p}: {:?} at {}", v.link, v.z));
                    }
                    points += rep.points;
                }
                Ok(points)
            })
            .collect();
        let mut total = 0;
        for r in results {
            total += r?;
        }
        Ok(format!("250 tensors, every S, {total} points, 0 violations"))
    });
}

#[test]
fn criterion_4_spectrum_coverage() {
    report(4, "eigenvalues lie in every region", Duration::from_secs(300), || {
        let results: Vec<Result<usize, String>> = (0..50usize)
            .into_par_iter()
            .map(|k| {
                let order = 3 + k % 2;
                let n = 2 + (k / 2) % 2;
                let mut r = rng(4_000 + k as u64);
                let t = if k % 5 == 4 {
                    dense_complex_gaussian(order, n, &mut r)
                } else {
                    dense_gaussian(order, n, &mut r)
                };
                let pairs = newton_eigenpairs(&t, &NewtonOptions::default());
                let mut checked = 0;
                for p in all_partitions(n) {
                    let regions = Regions::with_partition(&t, &p).unwrap();
                    for pair in pairs.iter().filter(|q| q.residual < 1e-10) {
                        for kind in RegionKind::ALL {
                            if !regions.contains(kind, pair.lambda, 1e-8).unwrap() {
                                return Err(format!("tensor {k}: {} outside {} for S = {p}", pair.lambda, kind.name()));
                            }
                        }
                        checked += 1;
                    }
                }
                if pairs.is_empty() {
                    return Err(format!("tensor {k}: no eigenpairs"));
                }
                Ok(checked)
            })
            .collect();
        let mut total = 0;
        for r in results {
            total += r?;
        }
        Ok(format!("50 tensors, {total} (eigenvalue, S) checks inside all four regions"))
    });
}

fn ladder_violation(t: &Tensor) -> Option<String> {
    let checker = DominanceChecker::new(t);
    for strict in [true, false] {
        let [dd, qd, sqd, ssdd] = DominanceClass::ladder(strict);
        let dd_holds = checker.check(dd, None).unwrap().holds;
        let qd_holds = checker.check(qd, None).unwrap().holds;
        if dd_holds && !qd_holds {
            return Some(format!("{dd} without {qd}"));
        }
        for p in all_partitions(t.dim()) {
            let sqd_holds = checker.check(sqd, Some(&p)).unwrap().holds;
            let ssdd_holds = checker.check(ssdd, Some(&p)).unwrap().holds;
            if qd_holds && !sqd_holds {
                return Some(format!("{qd} without {sqd} for S = {p}"));
            }
            if sqd_holds && !ssdd_holds {
                return Some(format!("{sqd} without {ssdd} for S = {p}"));
            }
        }
    }
    None
}

#[test]
fn criterion_5_dominance_ladder() {
    report(5, "dominance ladder", Duration::from_secs(120), || {
        let shapes: Vec<(usize, usize)> = [3, 4].iter().flat_map(|&m| [2, 3, 4].map(|n| (m, n))).collect();
        let mut r = rng(5_000);
        let mut rejected = 0;
        for k in 0..1000 {
            let (order, n) = shapes[k % shapes.len()];
            let t = sdd_tensor(order, n, &mut r);
            ensure(is_diagonally_dominant(&t, true).holds, || format!("SDD tensor {k} is not SDD"))?;
            if let Some(v) = ladder_violation(&t) {
                return Err(format!("SDD tensor {k}: {v}"));
            }
            let t = dd0_tensor(order, n, &mut r);
            ensure(is_diagonally_dominant(&t, false).holds, || format!("DD tensor {k} is not DD"))?;
            if let Some(v) = ladder_violation(&t) {
                return Err(format!("DD tensor {k}: {v}"));
            }
            let t = loop {
                let t = pivot_heavy(order, n, &mut r);
                if !is_diagonally_dominant(&t, true).holds && is_quasi_doubly_dd(&t, true).unwrap().holds {
                    break t;
                }
                rejected += 1;
            };
            if let Some(v) = ladder_violation(&t) {
                return Err(format!("QDSDD tensor {k}: {v}"));
            }
        }
        Ok(format!(
            "1000 SDD, 1000 DD (exact arithmetic), 1000 QDSDD-not-SDD ({rejected} candidates rejected); \
             strict and non-strict ladders, every S, 0 violations"
        ))
    });
}

#[test]
fn criterion_6_lemma_property() {
    report(6, "fraction ordering lemma", Duration::from_secs(1), || {
        let mut r = rng(6_000);
        for upper in [false, true] {
            let mut seen = 0;
            while seen < 10_000 {
                let b = uniform(&mut r, 0.0, 10.0);
                let c = uniform(&mut r, 0.0, 10.0);
                let d = uniform(&mut r, 0.5, 10.0);
                let ratio = if upper { uniform(&mut r, 1.0, 4.0) } else { uniform(&mut r, 0.0, 1.0) };
                let a = ratio * (b + c + d);
                let q = a / (b + c + d);
                if (upper && q < 1.0) || (!upper && q > 1.0) {
                    continue;
                }
                seen += 1;
                let (x, y, z) = lemma_fraction_bounds(a, b, c, d).map_err(|e| e.to_string())?;
                let ok = if upper {
                    x + 1e-12 >= y && y + 1e-12 >= z
                } else {
                    x <= y + 1e-12 && y <= z + 1e-12
                };
                ensure(ok, || format!("({a}, {b}, {c}, {d}) -> ({x}, {y}, {z})"))?;
            }
        }
        Ok("10^4 samples per branch, orderings hold".into())
    });
}

#[test]
fn criterion_7_matrix_reduction() {
    report(7, "order-2 reduction to matrices", Duration::from_secs(60), || {
        let mut r = rng(7_000);
        let mut matrices = 0;
        for k in 0..40 {
            let n = 2 + k % 2;
            let t = if k % 4 < 2 {
                dense_gaussian(2, n, &mut r)
            } else {
                dense_complex_gaussian(2, n, &mut r)
            };
            let a = matrix_of(&t);
            let roots = char_roots(&a, n);
            let pairs = newton_eigenpairs(&t, &NewtonOptions::default());
            ensure(pairs.len() == n, || format!("matrix {k}: {} eigenvalues, expected {n}", pairs.len()))?;
            for root in &roots {
                ensure(pairs.iter().any(|p| (p.lambda - root).norm() < 1e-8), || {
                    format!("matrix {k}: root {root} not found")
                })?;
            }
            for p in &pairs {
                ensure(roots.iter().any(|root| (p.lambda - root).norm() < 1e-8), || {
                    format!("matrix {k}: spurious eigenvalue {}", p.lambda)
                })?;
            }

            let w = default_window(&t, DEFAULT_MARGIN);
            for _ in 0..10_000 {
                let z = Complex64::new(uniform(&mut r, w.re_min, w.re_max), uniform(&mut r, w.im_min, w.im_max));
                let classical = (0..n).any(|i| {
                    let radius: f64 = (0..n).filter(|&j| j != i).map(|j| a[i * n + j].norm()).sum();
                    (z - a[i * n + i]).norm() <= radius
                });
                ensure(gamma_contains(&t, z) == classical, || format!("matrix {k}: disagreement at {z}"))?;
            }
            matrices += 1;
        }
        Ok(format!("{matrices} matrices (n = 2, 3): eigenvalues within 1e-8, 10^4 disk tests each agree"))
    });
}

#[test]
fn criterion_8_certifier_soundness() {
    report(8, "certifier soundness against the oracle", Duration::from_secs(600), || {
        let outcomes: Vec<Result<(Conclusion, Option<DominanceClass>), String>> = (0..500usize)
            .into_par_iter()
            .map(|k| {
                let order = if k % 3 == 2 { 6 } else { 4 };
                let n = 2 + k % 3;
                let mut r = rng(8_000 + k as u64);
                let weak = k % n;
                let t = symmetric_with_diagonal(order, n, 1.0, &mut r, |r, i, ri| {
                    // a mix of dominant, one-weak-row and indefinite diagonals
                    let f = match k % 10 {
                        0..=2 => uniform(r, 1.0, 2.0),
                        3..=7 if i == weak => uniform(r, 0.6, 1.0),
                        3..=7 => uniform(r, 1.5, 4.0),
                        8 => uniform(r, 0.2, 1.6),
                        _ => -uniform(r, 0.2, 1.6),
                    };
                    f * ri
                });
                let report = certify_definiteness(&t, &PartitionChoice::Search);
                if report.conclusion == Conclusion::Inconclusive {
                    return Ok((report.conclusion, None));
                }
                let cert = report.certificate().ok_or(format!("tensor {k}: conclusion without certificate"))?;
                let pairs = newton_eigenpairs(&t, &NewtonOptions::default());
                let newton_min = pairs
                    .iter()
                    .filter(|p| p.lambda.im.abs() <= 1e-8 * (1.0 + p.lambda.norm()))
                    .map(|p| p.lambda.re)
                    .fold(f64::INFINITY, f64::min);
                let power = shifted_power_extreme(&t, &PowerOptions::default()).map_err(|e| e.to_string())?;
                let min_real = newton_min.min(power.lambda.re);
                if min_real <= -1e-8 {
                    return Err(format!(
                        "tensor {k}: {} by {} but real eigenvalue {min_real}",
                        report.conclusion, cert.class
                    ));
                }
                Ok((report.conclusion, Some(cert.class)))
            })
            .collect();
        let mut definite = 0;
        let mut semidefinite = 0;
        let mut by_subset = 0;
        for o in outcomes {
            match o? {
                (Conclusion::PositiveDefinite, class) => {
                    definite += 1;
                    if class.is_some_and(|c| c.needs_partition()) {
                        by_subset += 1;
                    }
                }
                (Conclusion::PositiveSemidefinite, _) => semidefinite += 1,
                _ => {}
            }
        }
        ensure(definite >= 100, || format!("only {definite} definite certificates; test is too weak"))?;
        Ok(format!(
            "500 tensors: {definite} positive_definite ({by_subset} via a subset class), \
             {semidefinite} positive_semidefinite, all confirmed"
        ))
    });
}
