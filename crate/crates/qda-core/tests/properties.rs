use proptest::prelude::*;

use qda_core::densela::{thin_qr, LuFactor, Permutation};
use qda_core::doubling::{compute_w, compute_wt, step_w, step_wt};
use qda_core::eigapp::{cayley, nres1, nres2};
use qda_core::init::{reduce, reinit, Idea, Variant};
use qda_core::problems::{gen_random_split, random_left_factor, random_permutation, randn_complex, stream_rng};
use qda_core::qguard::{action_x, action_y, guard, GuardConfig};
use qda_core::sfq::SfqPencil;
use qda_core::ComplexMatrix;

fn random_pencil(m: usize, n: usize, seed: u64) -> SfqPencil {
    let mut rng = stream_rng(seed, 77);
    let e = randn_complex(m, m, &mut rng);
    let f = randn_complex(n, n, &mut rng);
    let x = randn_complex(n, m, &mut rng);
    let y = randn_complex(m, n, &mut rng);
    let q1 = random_permutation(m + n, &mut rng);
    let q2 = random_permutation(m + n, &mut rng);
    SfqPencil::new(e, f, x, y, q1, q2).unwrap()
}

fn well_conditioned_w(p: &SfqPencil) -> bool {
    LuFactor::new(&compute_w(p)).map(|l| l.cond_one() < 1e6).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernels_agree(m in 1usize..7, n in 1usize..7, seed in any::<u64>()) {
        let p = random_pencil(m, n, seed);
        prop_assume!(well_conditioned_w(&p));
        let a = step_w(&p).unwrap().next;
        let b = step_wt(&p).unwrap().next;
        prop_assert!(a.x.rel_diff(&b.x) < 1e-10);
        prop_assert!(a.y.rel_diff(&b.y) < 1e-10);
        prop_assert!(a.e.rel_diff(&b.e) < 1e-10);
        prop_assert!(a.f.rel_diff(&b.f) < 1e-10);
    }

    #[test]
    fn w_and_wt_singular_together(m in 1usize..6, n in 1usize..6, seed in any::<u64>()) {
        // det W = ± det W̃ up to the permutation sign
        let p = random_pencil(m, n, seed);
        let dw = LuFactor::new(&compute_w(&p)).map(|l| l.determinant().norm()).unwrap_or(0.0);
        let dwt = LuFactor::new(&compute_wt(&p)).map(|l| l.determinant().norm()).unwrap_or(0.0);
        prop_assert!((dw - dwt).abs() <= 1e-8 * dw.max(dwt).max(1.0));
    }

    #[test]
    fn dual_is_an_involution(m in 1usize..6, n in 1usize..6, seed in any::<u64>()) {
        let p = random_pencil(m, n, seed);
        prop_assert_eq!(p.dual().dual(), p);
    }

    #[test]
    fn dual_step_mirrors_primal(m in 1usize..6, n in 1usize..6, seed in any::<u64>()) {
        let p = random_pencil(m, n, seed);
        prop_assume!(well_conditioned_w(&p));
        let a = step_wt(&p).unwrap().next;
        let b = step_w(&p.dual()).unwrap().next;
        prop_assert_eq!(a, b.dual());
    }

    #[test]
    fn permutation_inverse_roundtrip(n in 1usize..20, seed in any::<u64>()) {
        let p = random_permutation(n, &mut stream_rng(seed, 5));
        prop_assert!(p.compose(&p.inverse()).is_identity());
        let pm = p.to_matrix();
        prop_assert!((&pm * &p.inverse().to_matrix()).is_identity());
    }

    #[test]
    fn thin_qr_reconstructs(rows in 2usize..9, seed in any::<u64>()) {
        let cols = 1 + (seed as usize) % rows;
        let z = randn_complex(rows, cols, &mut stream_rng(seed, 6));
        let (u, r) = thin_qr(&z).unwrap();
        prop_assert!((&u * &r).rel_diff(&z) < 1e-13);
        prop_assert!((&u.adjoint() * &u).rel_diff(&ComplexMatrix::identity(cols)) < 1e-13);
    }

    #[test]
    fn nres_scale_invariance(seed in 0u64..1000) {
        let inst = gen_random_split(3, 4, 8.0, 1.0, seed).unwrap();
        let z = inst.true_basis_stable.clone().unwrap();
        let noisy = &z + &randn_complex(7, 3, &mut stream_rng(seed, 9)).scale_real(1e-3);
        let h = &inst.pencil.a;
        let a2 = nres2(h, &noisy).unwrap();
        let b2 = nres2(h, &noisy.scale_real(10.0)).unwrap();
        prop_assert!((a2 - b2).abs() <= 1e-12 * a2.max(1e-300));
        // with X free, ‖Z‖_F scales with the numerator
        prop_assume!(noisy.norm_fro() >= 1.0);
        let a1 = nres1(h, &noisy, None).unwrap();
        let b1 = nres1(h, &noisy.scale_real(10.0), None).unwrap();
        prop_assert!((a1 - b1).abs() <= 1e-10 * a1);
    }
}

fn eig_ok(inst: &qda_core::problems::ProblemInstance, p: &SfqPencil, tol: f64) -> bool {
    let g = p.assemble();
    inst.max_eigenpair_residual(&g.a, &g.b).unwrap() <= tol
}

#[test]
fn actions_and_guard_preserve_eigenpairs() {
    for seed in 1..=8 {
        let inst = gen_random_split(4, 5, 8.0, 1e-3, seed).unwrap().cayley_transformed(-1.0).unwrap();
        let p0 = reduce(&inst.pencil, Idea::One, Variant::AFirst).unwrap().pencil;
        let (j, l, _) = p0.x.argmax_abs().unwrap();
        assert!(eig_ok(&inst, &action_x(&p0, j, l).unwrap(), 1e-9));
        let (j, l, _) = p0.y.argmax_abs().unwrap();
        assert!(eig_ok(&inst, &action_y(&p0, j, l).unwrap(), 1e-9));
        let cfg = GuardConfig { tau: Some(2.0), ..GuardConfig::default() };
        let (q, _) = guard(&p0, &cfg).unwrap();
        assert!(eig_ok(&inst, &q, 1e-9));
        let r = reinit(&p0, Idea::Three, Variant::BFirst).unwrap().pencil;
        assert!(eig_ok(&inst, &r, 1e-9));
    }
}

#[test]
fn actions_shrink_the_planted_entry() {
    let inst = gen_random_split(4, 5, 8.0, 1.0, 3).unwrap().cayley_transformed(-1.0).unwrap();
    let mut p = reduce(&inst.pencil, Idea::Three, Variant::AFirst).unwrap().pencil;
    p.x[(2, 1)] = qda_core::C64::new(5e4, 0.0);
    let q = action_x(&p, 2, 1).unwrap();
    assert!(q.x[(2, 1)].norm() <= 1.0 / 5e4 * (1.0 + 1e-12));
    assert_eq!(q.q1, {
        let mut s = p.q1.clone();
        s.swap_entries(1, 4 + 2);
        s
    });
}

#[test]
fn cayley_moves_eigenvalues() {
    let inst = gen_random_split(3, 4, 8.0, 1.0, 11).unwrap();
    let t = inst.cayley_transformed(-2.0).unwrap();
    assert_eq!(t.pencil, cayley(&inst.pencil, -2.0).unwrap());
    assert!(t.max_eigenpair_residual(&t.pencil.a, &t.pencil.b).unwrap() < 1e-10);
    assert!(t.stable_eigs.iter().all(|v| v.norm() < 1.0));
    assert!(t.anti_stable_eigs.iter().all(|v| v.norm() > 1.0));
    assert!(t.ground_truth_residual().unwrap() < 1e-10);
}

#[test]
fn left_mixing_keeps_ground_truth() {
    let inst = gen_random_split(3, 4, 8.0, 1.0, 2).unwrap();
    let l = random_left_factor(7, 2);
    let mixed = inst.left_multiplied(&l).unwrap();
    assert!(!mixed.pencil.b.is_identity());
    assert!(mixed.ground_truth_residual().unwrap() < 1e-10);
    let id = Permutation::identity(7);
    assert!(id.is_identity());
}
