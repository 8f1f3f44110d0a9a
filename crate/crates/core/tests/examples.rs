macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(word_length);
example!(tsp_solvers);
example!(defect_lemma);
example!(random_walk);
example!(clt_check);
example!(tracking);
example!(custom_lamps);
