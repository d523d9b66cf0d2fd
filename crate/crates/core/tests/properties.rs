mod props;

#[test]
fn judge_is_downward_closed() {
    props::judge_is_downward_closed().unwrap();
}

#[test]
fn gen_term_generalises_within_the_type() {
    props::gen_term_generalises_within_the_type().unwrap();
}

#[test]
fn filtering_is_stable() {
    props::filtering_is_stable().unwrap();
}

#[test]
fn hide_nf_does_not_propagate_bindings() {
    props::hide_nf_does_not_propagate_bindings().unwrap();
}

#[test]
fn map_residuals_are_closed() {
    props::map_residuals_are_closed().unwrap();
}

#[test]
fn kmp_residuals_are_closed() {
    props::kmp_residuals_are_closed().unwrap();
}

#[test]
fn rigid_sizes_survive_instantiation() {
    props::rigid_sizes_survive_instantiation().unwrap();
}
