use super::*;
use crate::eigen::operator_norm;
use crate::matrix::distance;
use crate::subspace::{intersect_via_nullspace, AffineSubspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn random_subspace(d: usize, k: usize, rng: &mut ChaCha8Rng) -> Subspace {
    let b = Matrix::from_fn(d, k, |_, _| StandardNormal.sample(rng));
    Subspace::from_basis(&b).unwrap()
}

fn random_family(dims: &[usize], d: usize, seed: u64) -> Vec<Subspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dims.iter()
        .map(|&k| random_subspace(d, k, &mut rng))
        .collect()
}

fn all_kinds_on(family: &[Subspace]) -> Vec<SplittingScheme> {
    SchemeKind::ALL
        .iter()
        .filter(|k| k.supports(family.len()))
        .map(|&k| build_scheme(k, family).unwrap())
        .collect()
}

fn blocks_agree(v: &[f64], d: usize) -> f64 {
    let first = &v[..d];
    v.chunks(d).map(|b| distance(b, first)).fold(0.0, f64::max)
}

#[test]
fn ryu_with_full_spaces() {
    let full = Subspace::full(3);
    let s = build_ryu(&full, &full, &full).unwrap();
    let id = Matrix::identity(3);
    let zero = Matrix::zeros(3, 3);
    let want = Matrix::block_diag(&[&id, &zero]);
    assert!(s.operator().max_abs_diff(&want) < 1e-14);
    assert!(s.fixed_projector().max_abs_diff(&want) < 1e-12);
    assert_eq!(s.inner().shape(), (9, 6));
}

#[test]
fn mt_and_campoy_swap_with_full_spaces() {
    let full = vec![Subspace::full(2); 3];
    let id = Matrix::identity(2);
    let zero = Matrix::zeros(2, 2);
    let swap =
        Matrix::block_assemble(&[vec![zero.clone(), id.clone()], vec![id.clone(), zero]]).unwrap();
    let half = Matrix::block_assemble(&[vec![id.clone(), id.clone()], vec![id.clone(), id]])
        .unwrap()
        .scale(0.5);
    for s in [build_mt(&full).unwrap(), build_campoy(&full).unwrap()] {
        assert!(s.operator().max_abs_diff(&swap) < 1e-14, "{}", s.kind());
        assert!(
            s.fixed_projector().max_abs_diff(&half) < 1e-12,
            "{}",
            s.kind()
        );
    }
}

#[test]
fn pocs_with_full_spaces_is_identity() {
    let s = build_pocs(&vec![Subspace::full(4); 3]).unwrap();
    assert!(s.operator().max_abs_diff(&Matrix::identity(4)) < 1e-15);
    assert!(s.fixed_projector().max_abs_diff(&Matrix::identity(4)) < 1e-12);
}

#[test]
fn pocs_at_three_quarters_is_the_composition() {
    let fam = random_family(&[4, 5, 3], 6, 11);
    let s = build_pocs(&fam).unwrap();
    let relaxed = &Matrix::identity(6).scale(0.25) + &s.operator().scale(0.75);
    let comp = &(fam[2].projector() * fam[1].projector()) * fam[0].projector();
    assert!(relaxed.max_abs_diff(&comp) < 1e-12);
}

#[test]
fn arity_and_dimension_errors() {
    let two = random_family(&[2, 2], 4, 1);
    assert!(build_mt(&two).is_err());
    assert!(build_campoy(&two).is_err());
    let four = random_family(&[3, 3, 3, 3], 4, 2);
    assert!(build_pocs(&four).is_err());
    assert!(build_scheme(SchemeKind::Ryu, &four).is_err());
    let mixed = vec![Subspace::full(3), Subspace::full(3), Subspace::full(4)];
    assert!(matches!(build_mt(&mixed), Err(Error::DimensionMismatch(_))));
    assert!(build_ryu(&mixed[0], &mixed[1], &mixed[2]).is_err());
}

#[test]
fn scheme_kind_names_round_trip() {
    for k in SchemeKind::ALL {
        assert_eq!(k.name().parse::<SchemeKind>().unwrap(), k);
    }
    assert!("dr".parse::<SchemeKind>().is_err());
}

#[test]
fn structural_invariants_on_random_instances() {
    let shapes: [&[usize]; 4] = [&[5, 4, 5], &[3, 4, 5], &[4, 4, 4, 5], &[5, 5, 5, 5, 4]];
    for (seed, dims) in shapes.iter().enumerate() {
        let fam = random_family(dims, 6, 100 + seed as u64);
        let z = intersect_via_nullspace(&fam).unwrap();
        for s in all_kinds_on(&fam) {
            let tag = format!("{} on {dims:?}", s.kind());
            let t = s.operator();
            let p = s.fixed_projector();
            assert!(operator_norm(t).unwrap() <= 1.0 + 1e-9, "{tag}: expansive");
            assert!(p.asymmetry() <= 1e-9, "{tag}");
            assert!((p * p).max_abs_diff(p) <= 1e-9, "{tag}");
            assert!((t * p).max_abs_diff(p) <= 1e-9, "{tag}: T P_fix");
            assert!((&(p * t) * p).max_abs_diff(p) <= 1e-9, "{tag}");
            assert!(
                s.solution_projector().max_abs_diff(z.projector()) <= 1e-8,
                "{tag}: P_Z"
            );
            let lhs = s.shadow() * p;
            let rhs = s.solution_projector() * s.reference();
            assert!(
                lhs.max_abs_diff(&rhs) <= 1e-8,
                "{tag}: shadow at fixed points"
            );
        }
    }
}

#[test]
fn fixed_points_have_agreeing_resolvent_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (seed, dims) in [[5usize, 4, 5], [4, 4, 5], [5, 5, 3]].iter().enumerate() {
        let fam = random_family(dims, 6, 200 + seed as u64);
        let ryu = build_ryu(&fam[0], &fam[1], &fam[2]).unwrap();
        let mt = build_mt(&fam).unwrap();
        let campoy = build_campoy(&fam).unwrap();
        for _ in 0..10 {
            let w = gaussian_vec(12, &mut rng);
            for s in [&ryu, &mt] {
                let fixed = s.fixed_projector().matvec(&w);
                let outputs = s.inner().matvec(&fixed);
                assert!(blocks_agree(&outputs, 6) < 1e-8, "{}", s.kind());
            }
            let fixed = campoy.fixed_projector().matvec(&w);
            let resolved = campoy.inner().matvec(&fixed);
            let avg = campoy.reference().matvec(&w);
            let target = campoy.solution_projector().matvec(&avg);
            for b in resolved.chunks(6) {
                assert!(distance(b, &target) < 1e-8);
            }
        }
    }
}

#[test]
fn campoy_fixed_projector_parts_are_orthogonal() {
    let fam = random_family(&[5, 4, 5], 6, 31);
    let s = build_campoy(&fam).unwrap();
    let u = Subspace::finish(s.inner().clone()).unwrap();
    let v = product_projector(&fam[..2]).unwrap();
    let a = intersect2(&u, &v).unwrap();
    let b = intersect2(&u.complement(), &v.complement()).unwrap();
    assert!((a.projector() * b.projector()).max_abs() < 1e-9);
}

#[test]
fn generic_step_matches_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (seed, dims) in [vec![5, 4, 5], vec![3, 5, 4, 4]].iter().enumerate() {
        let fam = random_family(dims, 6, 300 + seed as u64);
        let oracles: Vec<ResolventOracle> = fam.iter().map(ResolventOracle::subspace).collect();
        for s in all_kinds_on(&fam) {
            for _ in 0..100 {
                let z = gaussian_vec(s.state_dim(), &mut rng);
                let out = evaluate_generic(s.kind(), &oracles, &z).unwrap();
                let want = s.operator().matvec(&z);
                assert!(distance(&out.next, &want) <= 1e-10, "{}", s.kind());
                let shadow = s.shadow().matvec(&z);
                assert!(distance(&out.shadow, &shadow) <= 1e-10, "{}", s.kind());
            }
        }
    }
}

#[test]
fn generic_ryu_with_identity_resolvents() {
    let id = vec![ResolventOracle::identity(2); 3];
    let next = apply_generic_step(SchemeKind::Ryu, &id, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!(next, vec![1.0, 2.0, 0.0, 0.0]);
}

#[test]
fn campoy_generic_step_blockwise() {
    let fam = random_family(&[4, 5, 3], 5, 9);
    let oracles: Vec<ResolventOracle> = fam.iter().map(ResolventOracle::subspace).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let z = gaussian_vec(10, &mut rng);
    let next = apply_generic_step(SchemeKind::Campoy, &oracles, &z).unwrap();
    let mean: Vec<f64> = (0..5).map(|i| 0.5 * (z[i] + z[5 + i])).collect();
    let p = fam[2].project(&mean);
    for i in 0..2 {
        let zi = &z[5 * i..5 * i + 5];
        let refl: Vec<f64> = p.iter().zip(zi).map(|(p, z)| 2.0 * p - z).collect();
        let x = fam[i].project(&refl);
        for j in 0..5 {
            let want = zi[j] + 2.0 * (x[j] - p[j]);
            assert!((next[5 * i + j] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn generic_step_rejects_bad_arity_and_length() {
    let ors = vec![ResolventOracle::identity(3); 2];
    assert!(apply_generic_step(SchemeKind::MalitskyTam, &ors, &[0.0; 3]).is_err());
    let ors = vec![ResolventOracle::identity(3); 3];
    assert!(apply_generic_step(SchemeKind::Ryu, &ors, &[0.0; 5]).is_err());
    assert!(apply_generic_step(SchemeKind::Pocs, &ors, &[0.0; 3]).is_ok());
}

#[test]
fn dump_contains_every_matrix() {
    let fam = random_family(&[2, 2, 2], 3, 8);
    let s = build_mt(&fam).unwrap();
    let text = s.dump_string();
    for name in ["T", "M", "P_fix", "P_Z", "shadow"] {
        assert!(text.contains(&format!("# {name}\n")));
    }
    let dir = std::env::temp_dir().join(format!("projsplit-dump-{}", std::process::id()));
    s.write_dump(&dir).unwrap();
    let t = crate::textio::read_matrix(dir.join("T.txt")).unwrap();
    assert!(t.max_abs_diff(s.operator()) == 0.0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn affine_with_zero_anchors_is_linear() {
    let fam = random_family(&[5, 4, 5], 6, 21);
    let sets: Vec<AffineSubspace> = fam.iter().cloned().map(AffineSubspace::linear).collect();
    for k in SchemeKind::ALL {
        let (_, conj) = build_affine(k, &sets).unwrap();
        assert!(conj.translation.iter().all(|v| *v == 0.0));
        assert!(conj.offset.iter().all(|v| *v == 0.0));
    }
}

fn translated_family(seed: u64) -> (Vec<Subspace>, Vec<AffineSubspace>, Vec<f64>) {
    let fam = random_family(&[5, 4, 5], 6, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
    let common = gaussian_vec(6, &mut rng);
    // Each anchor is the common point plus a displacement inside the set.
    let sets = fam
        .iter()
        .map(|s| {
            let inside = s.project(&gaussian_vec(6, &mut rng));
            let anchor: Vec<f64> = common.iter().zip(&inside).map(|(a, b)| a + b).collect();
            AffineSubspace::new(s.clone(), anchor).unwrap()
        })
        .collect();
    (fam, sets, common)
}

#[test]
fn affine_shadow_limit_matches_direct_iteration() {
    let (_, sets, common) = translated_family(40);
    let oracles: Vec<ResolventOracle> = sets.iter().map(ResolventOracle::affine).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let x0 = gaussian_vec(6, &mut rng);
    for k in SchemeKind::ALL {
        let (scheme, conj) = build_affine(k, &sets).unwrap();
        for set in &sets {
            assert!(distance(&set.project(&conj.solution_anchor), &conj.solution_anchor) < 1e-8);
        }
        let want =
            conj.project_solution(&scheme, &scheme.reference().matvec(&scheme.replicate(&x0)));
        // the projection onto the affine intersection, computed independently
        let shifted: Vec<f64> = x0.iter().zip(&common).map(|(x, c)| x - c).collect();
        let direct_target: Vec<f64> = scheme
            .solution_projector()
            .matvec(&shifted)
            .iter()
            .zip(&common)
            .map(|(p, c)| p + c)
            .collect();
        assert!(distance(&want, &direct_target) < 1e-9, "{k}");

        let mut z = scheme.replicate(&x0);
        let mut shadow = Vec::new();
        for _ in 0..4000 {
            let relaxed = evaluate_generic(k, &oracles, &z).unwrap();
            shadow = relaxed.shadow;
            z = z
                .iter()
                .zip(&relaxed.next)
                .map(|(a, b)| 0.5 * a + 0.5 * b)
                .collect();
        }
        assert!(
            distance(&shadow, &want) < 1e-6,
            "{k}: {}",
            distance(&shadow, &want)
        );
        let fixed = conj.fixed_point_projection(&scheme, &scheme.replicate(&x0));
        assert!(distance(&z, &fixed) < 1e-6, "{k}");
    }
}

#[test]
fn inconsistent_affine_is_rejected() {
    // three parallel lines in the plane, pairwise disjoint
    let line = Subspace::from_basis(&Matrix::column(&[1.0, 0.0]).unwrap()).unwrap();
    let sets: Vec<AffineSubspace> = [0.0, 1.0, 2.0]
        .iter()
        .map(|&y| AffineSubspace::new(line.clone(), vec![0.0, y]).unwrap())
        .collect();
    for k in SchemeKind::ALL {
        let err = build_affine(k, &sets).unwrap_err();
        assert!(
            err.to_string().starts_with("inconsistent-affine"),
            "{k}: {err}"
        );
    }
}

fn ryu_three_lines_closed_form(theta: f64) -> (Matrix, Matrix) {
    let (s, c) = theta.sin_cos();
    let (c2, c3, c4, c5) = (c * c, c.powi(3), c.powi(4), c.powi(5));
    let (s2, s3, s4) = (s * s, s.powi(3), s.powi(4));
    let k = (2.0 * c3 - c) * s;
    let t = Matrix::from_rows(&[
        vec![2.0 * c4 - c2, -2.0 * k, -2.0 * s4 + s2, -k],
        vec![
            2.0 * c3 * s,
            -4.0 * c2 * s2 + 1.0,
            2.0 * c * s3,
            2.0 * c4 - 2.0 * c2,
        ],
        vec![
            2.0 * c4 - 2.0 * c2,
            -2.0 * k,
            -2.0 * c4 + 2.0 * c2,
            -2.0 * c3 * s,
        ],
        vec![k, -4.0 * c2 * s2, -k, 2.0 * c4 - c2],
    ])
    .unwrap();
    let a = -1.0 / (4.0 * s2 - 5.0);
    let b = 2.0 * c * s / (4.0 * c2 + 1.0);
    let e = -2.0 * (c4 - c2) / (4.0 * s4 - 5.0 * s2);
    let f = 4.0 * (s4 - s2) / (4.0 * s2 - 5.0);
    let g = 4.0 * (c5 - c3) / ((4.0 * c2 + 1.0) * s);
    let h = -4.0 * c4 / (4.0 * s2 - 5.0);
    let p = Matrix::from_rows(&[
        vec![0.0, 0.0, 0.0, 0.0],
        vec![0.0, a, b, e],
        vec![0.0, b, f, g],
        vec![0.0, e, g, h],
    ])
    .unwrap();
    (t, p)
}

#[test]
fn ryu_three_lines_matches_closed_form() {
    for theta in [0.2, 0.5, std::f64::consts::PI / 6.0, 1.0, 1.4] {
        let [u, v, w] = crate::spectral::three_lines(theta);
        let s = build_ryu(&u, &v, &w).unwrap();
        let (t, p) = ryu_three_lines_closed_form(theta);
        assert!(
            s.operator().max_abs_diff(&t) < 1e-12,
            "T at {theta}: {:?}",
            s.operator()
        );
        assert!(
            s.fixed_projector().max_abs_diff(&p) < 1e-9,
            "P_fix at {theta}: {:?}",
            s.fixed_projector()
        );
    }
}

#[test]
fn mt_three_lines_matches_closed_form() {
    for theta in [0.2f64, 0.5, 1.0, 1.4] {
        let (s, c) = theta.sin_cos();
        let (s2, s4, c2) = (s * s, s.powi(4), c * c);
        let k = (2.0 * c.powi(3) - c) * s;
        let t = Matrix::from_rows(&[
            vec![0.0, -c * s, c2, c * s],
            vec![0.0, c2, c * s, s2],
            vec![
                4.0 * c.powi(4) - 4.0 * c2 + 1.0,
                2.0 * c * s.powi(3),
                0.0,
                -2.0 * k,
            ],
            vec![2.0 * k, 2.0 * s4 - s2, 0.0, -4.0 * c2 * s2 + 1.0],
        ])
        .unwrap();
        let q = 2.0 * c * s.powi(3) - c * s;
        let p = Matrix::from_rows(&[
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.5, c * s, s2 - 0.5],
            vec![0.0, c * s, -2.0 * s4 + 2.0 * s2, q],
            vec![0.0, s2 - 0.5, q, 2.0 * s4 - 2.0 * s2 + 0.5],
        ])
        .unwrap();
        let scheme = build_mt(&crate::spectral::three_lines(theta)).unwrap();
        // The lower-right block of the cascade is (Id − P_W)(Id − P_V); the
        // closed form above was typed with (Id − P_W)(Id − P_U) there, so
        // that block is checked separately.
        let lines = crate::spectral::three_lines(theta);
        let id = Matrix::identity(2);
        let corner = &(&id - lines[2].projector()) * &(&id - lines[1].projector());
        let got = scheme.operator();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i >= 2 && j >= 2 {
                    corner[(i - 2, j - 2)]
                } else {
                    t[(i, j)]
                };
                assert!((got[(i, j)] - want).abs() < 1e-12, "T[{i},{j}] at {theta}");
            }
        }
        assert!(
            scheme.fixed_projector().max_abs_diff(&p) < 1e-9,
            "P_fix at {theta}"
        );
    }
}

#[test]
fn campoy_three_lines_is_the_closed_form_isometry() {
    for theta in [0.2f64, 0.5, 1.0, 1.4] {
        let (s, c) = (2.0 * theta).sin_cos();
        let t = Matrix::from_rows(&[
            vec![-s * s, s * c, c * c, s * c],
            vec![-s * c, c * c, -s * c, -s * s],
            vec![c, s, 0.0, 0.0],
            vec![0.0, 0.0, -s, c],
        ])
        .unwrap();
        let scheme = build_campoy(&crate::spectral::three_lines(theta)).unwrap();
        assert!(scheme.operator().max_abs_diff(&t) < 1e-12, "T at {theta}");
        let tt = &scheme.operator().transpose() * scheme.operator();
        assert!(tt.max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }
}

#[test]
fn pocs_three_lines_matches_closed_form() {
    for theta in [0.2f64, 0.5, 1.0, 1.4] {
        let (s, c) = theta.sin_cos();
        let t = Matrix::from_rows(&[
            vec![8.0 * c.powi(4) - 4.0 * c * c - 1.0, 0.0],
            vec![8.0 * c.powi(3) * s, -1.0],
        ])
        .unwrap()
        .scale(1.0 / 3.0);
        let scheme = build_pocs(&crate::spectral::three_lines(theta)).unwrap();
        assert!(scheme.operator().max_abs_diff(&t) < 1e-12);
        assert!(scheme.fixed_projector().max_abs() < 1e-12);
    }
}
