use modulieis_core::curve::{find_full_torsion_curve, torsion_table, TorsionTable};
use modulieis_core::identities::{verify_all, IdentityId};
use modulieis_core::modelbuild::{build_model, expected_dimensions, verify_model};
use modulieis_core::series::{SeriesContext, DEFAULT_ORDER};
use modulieis_core::Error;

#[test]
fn curve_to_model_through_public_api() {
    let c = find_full_torsion_curve(71, 5).unwrap();
    let t = torsion_table(&c, 5).unwrap();
    let back = TorsionTable::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);

    let ctx = SeriesContext::new(&back, DEFAULT_ORDER).unwrap();
    let reports = verify_all(
        &ctx,
        &[IdentityId::I4, IdentityId::I8, IdentityId::I12],
        10,
        0,
    )
    .unwrap();
    assert!(reports.iter().all(|r| r.passed()));

    let m = build_model(&t).unwrap();
    let want = expected_dimensions(5);
    assert_eq!(
        (
            m.diagnostics.dim_v,
            m.diagnostics.dim_vp,
            m.diagnostics.fiber
        ),
        (want.dim_v, want.dim_vp, want.fiber)
    );
    assert!(verify_model(&m, &t).unwrap().passed());
}

#[test]
fn models_do_not_cross_fields() {
    let m =
        build_model(&torsion_table(&find_full_torsion_curve(19, 3).unwrap(), 3).unwrap()).unwrap();
    let other = torsion_table(&find_full_torsion_curve(31, 3).unwrap(), 3).unwrap();
    assert!(matches!(
        verify_model(&m, &other),
        Err(Error::ConventionMismatch)
    ));
}
