use fninf_core::suites::{run_suite, DEFAULT_SEED};

fn check(id: u8) {
    let r = run_suite(id, DEFAULT_SEED);
    println!("suite {id} {}: {} ({:?})", r.name, r.detail, r.elapsed);
    assert!(r.passed, "suite {id}: {}", r.detail);
}

#[test]
fn group_laws() {
    check(1);
}

#[test]
fn phi_invariance() {
    check(2);
}

#[test]
fn fixed_slope() {
    check(3);
}

#[test]
fn transport() {
    check(4);
}

#[test]
fn centralizer() {
    check(5);
}

#[test]
fn half_lattice() {
    check(6);
}

#[test]
fn conjugacy() {
    check(7);
}

#[test]
fn exotic() {
    check(8);
}
