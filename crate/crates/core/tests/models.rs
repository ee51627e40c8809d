use std::sync::Arc;

use dihom_core::act::FgAbelian;
use dihom_core::dispace::Model;
use dihom_core::models;
use dihom_core::trace::{
    natural_h, natural_p1, relative_p1, reversal_bijections, FundCategory, Grid, TraceError,
};

fn fund(m: &Model) -> FundCategory {
    FundCategory::new(Arc::new(Grid::new(m.space.region())))
}

fn pair(m: &Model, fc: &FundCategory, a: &str, b: &str) -> (usize, usize) {
    let g = fc.grid();
    (
        g.index_of(m.point(a).unwrap()).unwrap(),
        g.index_of(m.point(b).unwrap()).unwrap(),
    )
}

#[test]
fn fig1x_sizes_and_named_pairs() {
    let m = models::load("FIG1X");
    let fc = fund(&m);
    let c = fc.category();
    assert_eq!((c.num_objects(), c.num_morphisms()), (51, 1653));
    assert_eq!(c.fact_morphism_count(), 186_967);
    assert_eq!(c.composable_pairs().count(), 21_854);
    let (d, _) = natural_p1(&fc);
    let (a, b) = pair(&m, &fc, "alpha", "beta");
    let (_, bp) = pair(&m, &fc, "alpha", "beta_prime");
    assert_eq!(d.value(fc.morphism(a, b, 0)).size, 6);
    assert_eq!(d.value(fc.morphism(a, bp, 3)).size, 4);
    assert_eq!(d.value(fc.morphism(a, bp, 3)).base, 3);

    let h1 = natural_h(&fc, 1).unwrap();
    assert_eq!(h1.system.value(fc.morphism(a, b, 2)), &FgAbelian::free(6));
}

#[test]
fn planar_models_have_no_second_homology_system() {
    for name in ["FIG1X", "FIG1Y", "SWISS1", "SQUARE"] {
        let fc = fund(&models::load(name));
        let h2 = natural_h(&fc, 2).unwrap();
        assert!(h2.system.values().iter().all(FgAbelian::is_zero), "{name}");
    }
}

#[test]
fn fig1y_corner_and_unsupported_degree() {
    let m = models::load("FIG1Y");
    let fc = fund(&m);
    let (a, b) = pair(&m, &fc, "alpha", "beta");
    assert_eq!(fc.category().hom(a, b).len(), 6);
    assert_eq!(natural_h(&fc, 3).unwrap_err(), TraceError::Index(3));
}

#[test]
fn square_is_a_poset() {
    let fc = fund(&models::load("SQUARE"));
    let c = fc.category();
    for x in 0..c.num_objects() {
        for y in 0..c.num_objects() {
            let expected = usize::from(fc.grid().below(x, y));
            assert_eq!(c.hom(x, y).len(), expected);
        }
    }
}

#[test]
fn reversal_matches_named_pairs() {
    let m = models::load("FIG1X");
    let r = m.reverse();
    // the small hole next to alpha has no partner next to beta
    assert!(!m.space.is_time_symmetric());
    assert!(models::load("SWISS1").space.is_time_symmetric());
    let (f, rf) = (fund(&m), fund(&r));
    let rev = reversal_bijections(&f, &rf, m.space.bounds()).unwrap();
    assert!(rev.check_bijections(&rf, &f).is_clean());
    // alpha -> beta becomes beta# -> alpha# in the reversed model
    let (b_sharp, a_sharp) = pair(&r, &rf, "beta", "alpha");
    assert_eq!(rf.table().count(a_sharp, b_sharp), 0);
    assert_eq!(rf.table().count(b_sharp, a_sharp), 6);
    let (bp_sharp, _) = pair(&r, &rf, "beta_prime", "alpha");
    assert_eq!(rf.table().count(bp_sharp, a_sharp), 4);
}

#[test]
fn relative_to_the_whole_space_is_trivial() {
    let fc = fund(&models::load("SWISS1"));
    let rel = relative_p1(&fc, &fc).unwrap();
    assert!(rel.p1_rel.values().iter().all(|v| v.size == 1));
    assert!(rel.check().is_clean());
}

#[test]
fn first_chamber_collapses_its_own_classes() {
    let m = models::load("FIG1X");
    let fx = fund(&m);
    let fa = FundCategory::new(Arc::new(Grid::new(m.subspace.as_ref().unwrap().region())));
    let rel = relative_p1(&fx, &fa).unwrap();
    let (a, mid) = pair(&m, &fa, "alpha", "mid");
    let f = fa.morphism(a, mid, 0);
    // the two ways around the small hole stay distinct in X
    assert_eq!(rel.p1_a.value(f).size, 2);
    assert_eq!(rel.p1_x.value(f).size, 2);
    assert_eq!(rel.p1_rel.value(f).size, 1);
}
