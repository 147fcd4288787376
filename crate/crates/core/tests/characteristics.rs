use hjadm_core::characteristics::{
    char_speed, critical_time, first_crossing, CharFan, CharLine, CriticalKind, SpeedField,
    DEFAULT_SCAN_POINTS,
};
use hjadm_core::{parse, ProblemSpec};
use std::f64::consts::PI;

fn problem(h: &str, u0: &str, a: f64, b: f64) -> ProblemSpec {
    ProblemSpec::new(parse(h).unwrap(), parse(u0).unwrap(), a, b).unwrap()
}

#[test]
fn fan_crossing_approaches_the_critical_time() {
    for h in ["sqrt(1+v^2)", "-sqrt(1+v^2)"] {
        let p = problem(h, "sin(x)", 0.0, 2.0 * PI);
        let t_star = critical_time(&p, DEFAULT_SCAN_POINTS).unwrap().t_star.unwrap();
        let mut last = f64::INFINITY;
        for n in [11, 101, 1001, 10_001] {
            let fan = CharFan::equispaced(&p, n).unwrap();
            let gap = (first_crossing(&fan).unwrap().unwrap() - t_star).abs();
            assert!(gap <= last, "{h}: fan of {n} is farther ({gap}) than a coarser one");
            last = gap;
        }
        assert!(last <= 1e-2, "{h}: {last}");
    }
}

#[test]
fn burgers_fan_crosses_at_one_half() {
    let p = problem("v^2/2", "-x^2", -1.0, 1.0);
    let fan = CharFan::equispaced(&p, 10_000).unwrap();
    assert!((first_crossing(&fan).unwrap().unwrap() - 0.5).abs() <= 1e-9);
    // every adjacent pair meets at the same time
    assert!(fan.adjacent_crossings().iter().all(|c| (c.unwrap() - 0.5).abs() <= 1e-9));
}

fn speeds_non_decreasing(p: &ProblemSpec) -> bool {
    let field = SpeedField::new(p).unwrap();
    let (a, b) = p.domain();
    let speeds: Vec<f64> = (0..1000)
        .map(|i| field.speed(a + (b - a) * i as f64 / 999.0).unwrap())
        .collect();
    speeds.windows(2).all(|w| w[1] >= w[0] - 1e-10)
}

#[test]
fn infinite_critical_time_iff_speeds_never_decrease() {
    let cases = [
        problem("v^2/2", "-x^2", -2.0, 2.0),
        problem("v^2/2", "x^2", -2.0, 2.0),
        problem("v^2/2", "exp(x)", -2.0, 2.0),
        problem("sqrt(1+v^2)", "3*x+1", -2.0, 2.0),
        problem("sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI),
        problem("-sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI),
        problem("v^3", "x^3", 0.5, 2.0),
        problem("v^3", "-x^3", 0.5, 2.0),
    ];
    for p in &cases {
        let r = critical_time(p, DEFAULT_SCAN_POINTS).unwrap();
        assert_eq!(
            r.kind == CriticalKind::Infinite,
            speeds_non_decreasing(p),
            "H = {}, u0 = {}",
            p.hamiltonian(),
            p.initial()
        );
    }
}

#[test]
fn critical_time_ignores_constant_shifts() {
    for (u0, shifted) in [("-x^2", "7 - x^2"), ("sin(x)", "sin(x) - 3/2")] {
        let a = critical_time(&problem("v^2/2", u0, -3.0, 3.0), 2000).unwrap();
        let b = critical_time(&problem("v^2/2", shifted, -3.0, 3.0), 2000).unwrap();
        assert_eq!(a, b, "{u0}");
    }
}

#[test]
fn first_crossing_depends_only_on_the_set_of_lines() {
    let p = problem("-sqrt(1+v^2)", "sin(x)", 0.0, 2.0 * PI);
    let fan = CharFan::equispaced(&p, 500).unwrap();
    let mut reversed: Vec<CharLine> = fan.lines().to_vec();
    reversed.reverse();
    let again = CharFan::new(reversed).unwrap();
    assert_eq!(again, fan);
    assert_eq!(first_crossing(&again).unwrap(), first_crossing(&fan).unwrap());
}

#[test]
fn parallel_lines_never_cross() {
    for (a, b) in [(1.0, 0.0), (3.0, 1.0), (-2.0, 5.0)] {
        let p = problem("-sqrt(1+v^2)", &format!("{a}*x + {b}"), -4.0, 4.0);
        let expected = -a / f64::sqrt(1.0 + a * a);
        assert!((char_speed(&p, 0.3).unwrap() - expected).abs() < 1e-15);
        let fan = CharFan::equispaced(&p, 1000).unwrap();
        assert_eq!(first_crossing(&fan).unwrap(), None);
    }
}
