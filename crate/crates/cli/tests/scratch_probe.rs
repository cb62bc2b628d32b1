// Temporary scaling probe; deleted before commit.
use trotterc::fixtures;
use trotterc_core::trotter::{build_step_from_terms, TrotterPlan, OrderStrategy, TsOrder};
use trotterc_core::synth::{SynthStyle, QubitOrder, SubtermOrder};

#[test]
#[ignore]
fn probe_depth_scaling() {
    for n in [6usize, 8, 10, 12] {
        let t0 = std::time::Instant::now();
        let terms = fixtures::dense_pqrs_terms(n, fixtures::DENSE_SEED);
        let base_plan = TrotterPlan {
            order_strategy: OrderStrategy::Lexicographic,
            ts_order: TsOrder::First,
            n_steps: 10,
            total_time: 1.0,
            style: SynthStyle::Standard,
            qubit_order: QubitOrder::Interleaved,
            subterm_order: SubtermOrder::Baseline,
            diagonal_fix: false,
            nest: false,
            cancel: false,
            ..TrotterPlan::default()
        };
        let base = build_step_from_terms(&terms, n, &base_plan).unwrap();
        let t1 = std::time::Instant::now();
        let opt_plan = TrotterPlan {
            style: SynthStyle::Ancilla,
            nest: true,
            cancel: true,
            subterm_order: SubtermOrder::Optimized,
            ..base_plan.clone()
        };
        let opt = build_step_from_terms(&terms, n, &opt_plan).unwrap();
        let t2 = std::time::Instant::now();
        let no_nest_plan = TrotterPlan { nest: false, ..opt_plan.clone() };
        let no_nest = build_step_from_terms(&terms, n, &no_nest_plan).unwrap();
        let d_base = base.circuit.parallel_depth(true);
        let d_opt = opt.circuit.parallel_depth(true);
        let d_nonest = no_nest.circuit.parallel_depth(true);
        println!(
            "N={n}: terms={} base: gates={} depth={} ({:?}) | opt: gates={} depth={} kept={} slots={} ({:?}) | nonest depth={} | ratio={:.2}",
            terms.len(), base.circuit.len(), d_base, t1 - t0,
            opt.circuit.len(), d_opt, opt.nested_kept, opt.schedule.n_slots, t2 - t1,
            d_nonest, d_base as f64 / d_opt as f64,
        );
    }
}
