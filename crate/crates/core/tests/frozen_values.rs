//! Frozen reference values through the public API.

use zsdeform_core::compositions::finite_expansion;
use zsdeform_core::deform_map::{detect_jump, fn_enclosure, hn_value, jump_part, Budget, JumpSite};
use zsdeform_core::rational::{parse, rat, to_f64};
use zsdeform_core::rigorous::exp_enclosure;
use zsdeform_core::{
    eta_tail, moran_solve, tau, tau_expand, tn_exact, Composition, DeformKey, Enclosure,
    SimilitudeFamily, TailSpec,
};

fn tn(n: u32, k: &str) -> String {
    let v = tn_exact(&DeformKey::new(n, k.parse().unwrap())).unwrap();
    zsdeform_core::rational::to_text(&v)
}

#[test]
fn exact_deformations() {
    assert_eq!(tn(1, "2"), "5/4");
    assert_eq!(tn(2, "2"), "49/36");
    assert_eq!(tn(1, "1,1"), "23/12");
    assert_eq!(tn(1, "2,1"), "103/72");
    assert_eq!(tn(1, "1"), "3/2");
}

#[test]
fn tail_limits() {
    let e = exp_enclosure(&rat(1, 1));
    let ones = eta_tail(1, &TailSpec::all_ones(), 60).unwrap();
    assert!(ones.intersects(&e) && ones.width_f64() < 1e-60);
    let twos = eta_tail(1, &TailSpec::all_twos(), 60).unwrap();
    assert!((twos.mid_f64() - 1.377_896_895_4).abs() < 1e-10);
    // e^{3/2} for n = 2
    let e32 = exp_enclosure(&rat(3, 2));
    assert!(eta_tail(2, &TailSpec::all_ones(), 60).unwrap().intersects(&e32));
}

#[test]
fn jump_values() {
    let h = hn_value(1, &JumpSite::new("1".parse().unwrap()).unwrap(), 60).unwrap();
    let want = &exp_enclosure(&rat(1, 1)) - &Enclosure::point(rat(5, 2));
    assert!(h.intersects(&want));
    assert!((h.mid_f64() - 0.218_281_828_459).abs() < 1e-12);
    let q = hn_value(1, &JumpSite::at(&rat(1, 4)).unwrap(), 60).unwrap();
    assert!((q.mid_f64() - 0.067_902_151_454).abs() < 1e-12);
}

#[test]
fn map_endpoints_and_jump() {
    let b = Budget::default();
    let f1 = fn_enclosure(1, &rat(1, 1), &b).unwrap();
    assert!(f1.intersects(&exp_enclosure(&rat(1, 1))));
    let small = fn_enclosure(1, &parse("1/1048576").unwrap(), &b).unwrap();
    assert!(small.lo() > &rat(1, 1) && to_f64(small.hi()) < 1.0 + 1e-5);
    let d = detect_jump(1, &rat(1, 2), 30, &b).unwrap();
    assert!(to_f64(&d.excess) < 1e-3);
    assert!(jump_part(1, &rat(1, 2), &b).unwrap().lo() < jump_part(1, &rat(3, 4), &b).unwrap().lo());
}

#[test]
fn tau_round_trips() {
    let t: TailSpec = "2,3+2*".parse().unwrap();
    let x = tau(&t);
    let (_, exact) = tau_expand(&x, 40).unwrap();
    assert_eq!(exact, Some(t));
    assert_eq!(finite_expansion(&rat(5, 8)), Some(Composition::new(vec![1, 2]).unwrap()));
    assert_eq!(tau(&TailSpec::all_ones()), rat(1, 1));
    assert_eq!(tau(&TailSpec::all_twos()), rat(1, 3));
}

#[test]
fn dimensions() {
    let tol = zsdeform_core::rational::pow2_neg(40);
    let s = moran_solve(&SimilitudeFamily::e2(), &tol).unwrap();
    assert!((s.mid_f64() - 0.694_241_913_6).abs() < 1e-9);
    let c4 = moran_solve(&SimilitudeFamily::cantor(4).unwrap(), &tol).unwrap();
    assert!(c4.contains(&rat(1, 2)) && c4.width() <= tol);
}
