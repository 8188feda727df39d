//! Runs every example so they cannot rot.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(best_index, "../examples/best_index.rs");
example!(closed_forms, "../examples/closed_forms.rs");
example!(families, "../examples/families.rs");
example!(invariants, "../examples/invariants.rs");
example!(json_report, "../examples/json_report.rs");
example!(manual_run, "../examples/manual_run.rs");
example!(oracle, "../examples/oracle.rs");
example!(policies, "../examples/policies.rs");
example!(ratio_set, "../examples/ratio_set.rs");
example!(sweep, "../examples/sweep.rs");
