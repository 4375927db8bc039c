//! Named reference measures used by the test suites, benchmarks and CLI.

use crate::moments::{Atom, FactorSpec, MeasureSpec};
use crate::scalar::Rational;

#[derive(Debug, Clone)]
pub struct NamedSpec {
    pub name: &'static str,
    pub spec: MeasureSpec,
}

fn named(name: &'static str, spec: MeasureSpec) -> NamedSpec {
    NamedSpec { name, spec }
}

pub fn gaussian() -> MeasureSpec {
    MeasureSpec::product(vec![FactorSpec::gaussian(0, 1)])
}

pub fn uniform() -> MeasureSpec {
    MeasureSpec::product(vec![FactorSpec::uniform(-1, 1)])
}

pub fn exponential() -> MeasureSpec {
    MeasureSpec::product(vec![FactorSpec::exponential(1)])
}

pub fn two_point() -> MeasureSpec {
    MeasureSpec::product(vec![FactorSpec::two_point(-1, 1)])
}

pub fn gaussian2() -> MeasureSpec {
    MeasureSpec::product(vec![FactorSpec::gaussian(0, 1), FactorSpec::gaussian(0, 1)])
}

pub fn gaussian_uniform() -> MeasureSpec {
    MeasureSpec::product(vec![FactorSpec::gaussian(0, 1), FactorSpec::uniform(-1, 1)])
}

pub fn uniform_exponential_gaussian() -> MeasureSpec {
    MeasureSpec::product(vec![
        FactorSpec::uniform(-1, 1),
        FactorSpec::exponential(1),
        FactorSpec::gaussian(0, 1),
    ])
}

pub fn two_point2() -> MeasureSpec {
    MeasureSpec::product(vec![
        FactorSpec::two_point(-1, 1),
        FactorSpec::two_point(-1, 1),
    ])
}

/// Equal masses at the vertices `(0,0), (1,0), (0,1)`: degenerate and not a
/// product.
pub fn triangle() -> MeasureSpec {
    let third = Rational::new(1.into(), 3.into());
    let pt = |x: i64, y: i64| Atom {
        point: vec![
            Rational::from_integer(x.into()),
            Rational::from_integer(y.into()),
        ],
        weight: third.clone(),
    };
    MeasureSpec::atomic(2, vec![pt(0, 0), pt(1, 0), pt(0, 1)])
}

pub fn one_dimensional() -> Vec<NamedSpec> {
    vec![
        named("gaussian", gaussian()),
        named("uniform", uniform()),
        named("exponential", exponential()),
        named("two_point", two_point()),
    ]
}

pub fn products() -> Vec<NamedSpec> {
    vec![
        named("gaussian2", gaussian2()),
        named("gaussian_uniform", gaussian_uniform()),
        named(
            "uniform_exponential_gaussian",
            uniform_exponential_gaussian(),
        ),
        named("two_point2", two_point2()),
    ]
}

/// Every reference measure.
pub fn shipped_specs() -> Vec<NamedSpec> {
    let mut all = one_dimensional();
    all.extend(products());
    all.push(named("triangle", triangle()));
    all
}
