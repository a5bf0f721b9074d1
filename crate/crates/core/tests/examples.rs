macro_rules! example_test {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));

            #[test]
            fn runs() {
                run_example().expect(concat!($file, " should run"));
            }
        }
    };
}

example_test!(priorities, "priorities.rs");
example_test!(ladder_fit, "ladder_fit.rs");
example_test!(adapt_chunk, "adapt_chunk.rs");
example_test!(oracle_check, "oracle_check.rs");
example_test!(siti, "siti.rs");
example_test!(storage, "storage.rs");
example_test!(simulate, "simulate.rs");
