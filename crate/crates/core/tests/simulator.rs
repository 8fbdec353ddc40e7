use icsim::algorithms::{
    default_schedule, AcsaState, AlgorithmKind, DistributedAlgorithm, MinibatchSgd, QueryHandle,
};
use icsim::instances::{choose_chain_parameters, InstanceDescriptor, InstanceKind, Problem};
use icsim::simulator::{
    audit_s_budget, audit_zero_respecting, run, run_spec, AlgorithmSpec, AuditFlags, SimConfig,
};
use icsim::{Error, Point, ProblemParams, Result, RngKey};

fn chain_problem(pp: &ProblemParams) -> Problem {
    InstanceDescriptor::of_kind(InstanceKind::Chain)
        .build(pp)
        .unwrap()
}

#[test]
fn one_machine_one_step_one_round_has_one_entry() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 1, 1, 1).unwrap();
    let problem = InstanceDescriptor::of_kind(InstanceKind::NoisyQuadratic)
        .build(&pp)
        .unwrap();
    for kind in AlgorithmKind::ALL {
        let res = run_spec(&kind.into(), &problem, &SimConfig::new(pp, 3).with_trace()).unwrap();
        let trace = res.trace.unwrap();
        assert_eq!(trace.len(), 1, "{kind}");
        assert_eq!((trace[0].machine, trace[0].round, trace[0].k), (0, 0, 0));
        assert_eq!(res.queries, 1);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 6, 8, 3).unwrap();
    let problem = chain_problem(&pp);
    for kind in AlgorithmKind::ALL {
        let cfg = SimConfig::new(pp, 11).with_trace();
        let on = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_spec(&kind.into(), &problem, &cfg).unwrap())
        };
        let a = on(1);
        let b = on(4);
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn single_machine_equals_sequential_acsa() {
    let pp = ProblemParams::new(1.0, 1.0, 0.5, 3, 5, 4).unwrap();
    let problem = InstanceDescriptor::of_kind(InstanceKind::NoisyQuadratic)
        .build(&pp)
        .unwrap();
    let seed = 9;
    let res = run_spec(
        &AlgorithmKind::SingleMachineAcsa.into(),
        &problem,
        &SimConfig::new(pp, seed),
    )
    .unwrap();

    let schedule = default_schedule(pp.smoothness, pp.radius, pp.sigma, pp.horizon()).unwrap();
    let mut st = AcsaState::new(problem.dim(), schedule);
    for r in 0..pp.rounds {
        for k in 0..pp.local_steps {
            let draw = problem
                .oracle
                .draw(&st.query(), RngKey::query(seed, 0, r, k))
                .unwrap();
            st.step(&draw.gradient).unwrap();
        }
    }
    assert_eq!(res.final_point, st.x);
    assert_eq!(res.queries, pp.horizon());
}

/// Asks for one query more than its budget.
struct Greedy;

impl DistributedAlgorithm for Greedy {
    type State = Point;
    type Local = ();

    fn name(&self) -> &str {
        "greedy"
    }
    fn init(&self, dim: usize) -> Point {
        Point::zeros(dim)
    }
    fn local_round(&self, state: &Point, oracle: &mut QueryHandle<'_>) -> Result<()> {
        for _ in 0..=oracle.budget() {
            oracle.query(state)?;
        }
        Ok(())
    }
    fn communicate(&self, state: Point, _locals: Vec<(usize, ())>) -> Result<Point> {
        Ok(state)
    }
    fn output(&self, state: &Point) -> Point {
        state.clone()
    }
}

#[test]
fn extra_query_is_a_hard_error() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 2, 3, 2).unwrap();
    let err = run(&Greedy, &chain_problem(&pp), &SimConfig::new(pp, 0)).unwrap_err();
    assert!(
        matches!(
            err,
            Error::QueryBudgetExceeded {
                budget: 3,
                round: 0,
                ..
            }
        ),
        "{err}"
    );
}

/// Queries the last coordinate before any gradient has revealed it.
struct Planted;

impl DistributedAlgorithm for Planted {
    type State = Point;
    type Local = ();

    fn name(&self) -> &str {
        "planted"
    }
    fn init(&self, dim: usize) -> Point {
        Point::zeros(dim)
    }
    fn local_round(&self, state: &Point, oracle: &mut QueryHandle<'_>) -> Result<()> {
        let n = state.dim();
        oracle.query(&Point::basis(n, n - 1))?;
        for _ in 1..oracle.budget() {
            oracle.query(state)?;
        }
        Ok(())
    }
    fn communicate(&self, state: Point, _locals: Vec<(usize, ())>) -> Result<Point> {
        Ok(state)
    }
    fn output(&self, state: &Point) -> Point {
        state.clone()
    }
}

#[test]
fn planted_violation_is_caught_at_first_query() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 3, 4, 2).unwrap();
    let problem = chain_problem(&pp);
    let res = run(
        &Planted,
        &problem,
        &SimConfig::new(pp, 1)
            .with_audits(AuditFlags::ALL)
            .with_trace(),
    )
    .unwrap();
    let zr = res.audit.unwrap().zero_respecting.unwrap();
    assert!(!zr.passed());
    let v = zr.first_violation.unwrap();
    assert_eq!((v.machine, v.round, v.k), (0, 0, 0));
    // The offline audit agrees with the online one.
    let offline = audit_zero_respecting(&res.trace.unwrap()).unwrap();
    assert_eq!(offline.first_violation, zr.first_violation);
}

#[test]
fn every_algorithm_passes_both_audits() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 4, 8, 3).unwrap();
    let problems = [
        chain_problem(&pp),
        InstanceDescriptor::of_kind(InstanceKind::ChainTwoPoint)
            .build(&pp)
            .unwrap(),
    ];
    for problem in &problems {
        for kind in AlgorithmKind::ALL {
            for seed in 0..20 {
                let cfg = SimConfig::new(pp, seed)
                    .with_audits(AuditFlags::ALL)
                    .with_trace();
                let res = run_spec(&AlgorithmSpec::from(kind), problem, &cfg).unwrap();
                let audit = res.audit.clone().unwrap();
                let zr = audit.zero_respecting.unwrap();
                let sb = audit.s_budget.unwrap();
                assert!(zr.passed(), "{} {kind} seed {seed}: {zr:?}", problem.name);
                assert!(sb.passed(), "{} {kind} seed {seed}: {sb:?}", problem.name);
                let trace = res.trace.unwrap();
                assert_eq!(audit_s_budget(&trace).unwrap(), sb);
                assert_eq!(trace.len(), res.queries);
            }
        }
    }
}

#[test]
fn minibatch_sgd_with_explicit_stepsize() {
    let pp = ProblemParams::new(1.0, 1.0, 0.0, 2, 4, 50).unwrap();
    let problem = InstanceDescriptor::of_kind(InstanceKind::NoisyQuadratic)
        .build(&pp)
        .unwrap();
    let alg = MinibatchSgd::new(&pp, Some(0.5)).unwrap();
    let res = run(&alg, &problem, &SimConfig::new(pp, 0)).unwrap();
    let s = &res.per_round_subopt;
    assert!(s.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(MinibatchSgd::new(&pp, Some(-1.0)).is_err());
}

#[test]
fn chain_parameters_need_two_machines() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 1, 4, 2).unwrap();
    assert!(choose_chain_parameters(&pp).is_err());
}
