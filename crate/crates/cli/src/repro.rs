//! The reproduction suite behind `cpol repro`.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Duration;

use cpol::bounds::{
    entropy_bound, entropy_rate_power, fibonacci, gh_counts, lambda_entropy, upper_bound,
    verify_fibonacci_construction, MAX_CHECKED_BASE,
};
use cpol::enumerate::{
    brute_force_oracle, census_stats, enumerate_orders, enumerate_to_file, OrderCensus,
};
use cpol::flips::{critical_pairs, is_flippable};
use cpol::order::random_utility_orders;
use cpol::precise::log2;
use cpol::subset::full_mask;
use cpol::utility::maclagan_special_atom;
use cpol::{
    characteristic_vector, check_trading_transform, cone_from_order, find_trading_transform,
    flippable_pairs, irreducible_elements, maclagan_utilities, order_from_utilities,
    ComparativeOrder, Error, Result,
};
use num_bigint::BigUint;
use num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

pub struct Options {
    pub census6: bool,
    pub budget: Option<Duration>,
    pub checkpoint: Option<PathBuf>,
}

fn outcome(id: u8, name: &'static str, r: Result<String>) -> CriterionResult {
    match r {
        Ok(detail) => CriterionResult {
            id,
            name,
            status: Status::Pass,
            detail,
        },
        Err(e) => CriterionResult {
            id,
            name,
            status: Status::Fail,
            detail: e.to_string(),
        },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Verification(msg()))
    }
}

fn base_orders() -> Result<Vec<(usize, ComparativeOrder)>> {
    (3..=MAX_CHECKED_BASE)
        .map(|n| Ok((n, order_from_utilities(&maclagan_utilities(n)?)?)))
        .collect()
}

pub fn run_all(opts: &Options) -> Vec<CriterionResult> {
    let bases = base_orders();
    let small: Result<Vec<OrderCensus>> = (1..=5).map(|n| enumerate_orders(n, None)).collect();
    vec![
        outcome(1, "Fibonacci construction", fibonacci_counts(&bases)),
        outcome(2, "friendly flips", friendliness()),
        outcome(3, "g/h table", gh_table()),
        outcome(4, "census n = 3, 4", small_census(&small)),
        outcome(5, "census n = 5", census_five(&small)),
        census_six(opts),
        outcome(7, "flippable pairs ↔ irreducibles", bijection(&small)),
        outcome(8, "cone axioms", cone_axioms()),
        outcome(9, "bounds", bound_checks()),
        outcome(10, "oracle equivalence", oracle()),
        outcome(11, "critical pair trichotomy", trichotomy(&bases)),
        outcome(12, "adjacency budget", adjacency_budget(&small, &bases)),
    ]
}

fn fibonacci_counts(bases: &Result<Vec<(usize, ComparativeOrder)>>) -> Result<String> {
    let bases = bases.as_ref().map_err(Clone::clone)?;
    let mut counts = Vec::new();
    for (n, o) in bases {
        let k = flippable_pairs(o).len();
        ensure(BigUint::from(k) == fibonacci(n + 2), || {
            format!("base {n}: {k} ≠ F_{}", n + 2)
        })?;
        counts.push(k.to_string());
    }
    Ok(format!("flippable counts {}", counts.join(", ")))
}

fn friendliness() -> Result<String> {
    let mut total = 0;
    for n in 3..=MAX_CHECKED_BASE {
        let r = verify_fibonacci_construction(n)?;
        ensure(
            r.friendly && r.representable_neighbors == r.neighbors,
            || format!("base {n}"),
        )?;
        total += r.neighbors;
    }
    Ok(format!("{total} flips, all representable"))
}

fn gh_table() -> Result<String> {
    let (g3, g4) = (gh_counts(3)?, gh_counts(4)?);
    ensure((g3.g, g3.h, g4.g, g4.h) == (2, 3, 5, 3), || {
        "(g_3, h_3, g_4, h_4)".into()
    })?;
    for n in 3..18 {
        let (a, b) = (gh_counts(n)?, gh_counts(n + 1)?);
        let expected = if n % 2 == 1 {
            (a.g + a.h, a.h)
        } else {
            (a.g, a.g + a.h)
        };
        ensure((b.g, b.h) == expected, || {
            format!("recurrence fails at n = {n}")
        })?;
    }
    Ok("(2,3), (5,3); recurrences hold for n = 3..18".into())
}

fn small_census(small: &Result<Vec<OrderCensus>>) -> Result<String> {
    let small = small.as_ref().map_err(Clone::clone)?;
    let mut detail = Vec::new();
    for (n, expected) in [(3, 3), (4, 5)] {
        let s = census_stats(&small[n - 1]);
        ensure(
            s.m == expected && s.facets_max == expected && s.facets_min == n,
            || {
                format!(
                    "n = {n}: m = {}, M = {}, min facets = {}",
                    s.m, s.facets_max, s.facets_min
                )
            },
        )?;
        detail.push(format!("m({n}) = M({n}) = {expected}, min facets {n}"));
    }
    Ok(detail.join("; "))
}

fn census_five(small: &Result<Vec<OrderCensus>>) -> Result<String> {
    let c = &small.as_ref().map_err(Clone::clone)?[4];
    let s = census_stats(c);
    let range: BTreeSet<usize> = s.irr_histogram.keys().copied().collect();
    ensure(range == BTreeSet::from([5, 6, 7, 8]), || {
        format!("|Irr| values {range:?}")
    })?;
    ensure(s.max_irr_orders_friendly, || {
        "an order with |Irr| = 8 has an unfriendly flip".into()
    })?;
    ensure(s.facets_max == 8, || format!("M(5) = {}", s.facets_max))?;
    let witness = (0..c.len()).filter(|&i| !c.representable[i]).find_map(|i| {
        find_trading_transform(&c.orders[i], 4)
            .filter(|t| check_trading_transform(t, &c.orders[i]).unwrap_or(false))
    });
    ensure(witness.is_some(), || {
        "no trading transform with k ≤ 4".into()
    })?;
    Ok(format!(
        "{} orders, {} representable, |Irr| ∈ {{5..8}}, M(5) = 8, transform of length {}",
        s.orders,
        s.representable,
        witness.unwrap().len()
    ))
}

fn census_six(opts: &Options) -> CriterionResult {
    let (id, name) = (6, "census n = 6");
    if !opts.census6 {
        return CriterionResult {
            id,
            name,
            status: Status::Skip,
            detail: "not requested".into(),
        };
    }
    let census = match &opts.checkpoint {
        Some(path) => enumerate_to_file(6, path, opts.budget)
            .and_then(|_| OrderCensus::read_ndjson(BufReader::new(File::open(path)?))),
        None => enumerate_orders(6, opts.budget),
    };
    match census {
        Err(Error::Resource { completed }) => CriterionResult {
            id,
            name,
            status: Status::Skip,
            detail: format!("budget exhausted after {completed} orders"),
        },
        Err(e) => outcome(id, name, Err(e)),
        Ok(c) => {
            let s = census_stats(&c);
            outcome(
                id,
                name,
                ensure(s.m == 13 && s.facets_max == 13, || {
                    format!("m(6) = {}, M(6) = {}", s.m, s.facets_max)
                })
                .map(|_| format!("{} orders, m(6) = M(6) = 13", s.orders)),
            )
        }
    }
}

fn bijection_holds(o: &ComparativeOrder) -> Result<bool> {
    let irr: HashSet<_> = irreducible_elements(&cone_from_order(o)?)
        .into_iter()
        .collect();
    let flips: HashSet<_> = flippable_pairs(o)
        .iter()
        .map(|p| characteristic_vector(&p.a(), &p.b()))
        .collect();
    Ok(irr == flips)
}

fn bijection(small: &Result<Vec<OrderCensus>>) -> Result<String> {
    let small = small.as_ref().map_err(Clone::clone)?;
    let mut checked = 0;
    for c in small {
        for o in &c.orders {
            ensure(bijection_holds(o)?, || o.to_line())?;
            checked += 1;
        }
    }
    for n in 6..=8 {
        for o in random_utility_orders(n, 100, 24, n as u64)? {
            ensure(bijection_holds(&o)?, || o.to_line())?;
            checked += 1;
        }
    }
    Ok(format!("{checked} orders"))
}

fn cone_axioms() -> Result<String> {
    for n in 3..=6 {
        for o in random_utility_orders(n, 100, 20, 100 + n as u64)? {
            cone_from_order(&o)?.check_axioms(true)?;
        }
    }
    Ok("D1–D3 on 400 random orders".into())
}

fn bound_checks() -> Result<String> {
    let five = upper_bound(5)?;
    let six = upper_bound(6)?;
    ensure(five.count_upper == "16" && six.count_upper == "22", || {
        "upper bounds".into()
    })?;
    for n in 3..=24 {
        let b = upper_bound(n)?;
        ensure(b.fib_lower_value() <= b.count_upper_value(), || {
            format!("n = {n}")
        })?;
    }
    let quarter = BigRational::new(1.into(), 4.into());
    let rate = entropy_bound(1, &quarter)?;
    let bound = BigRational::new(17548.into(), 10000.into());
    ensure(rate.rate_below(&bound), || {
        "2^H(1/4) < 1.7548 not certified".into()
    })?;
    let (power, q) = entropy_rate_power(&quarter);
    ensure(power < num_traits::pow(bound, q as usize), || {
        "exact power check".into()
    })?;
    let h = lambda_entropy();
    let (lo, hi) = (
        log2(&BigRational::new(17087.into(), 10000.into())),
        log2(&BigRational::new(17088.into(), 10000.into())),
    );
    ensure(lo.hi < h.lo && h.hi < hi.lo, || {
        "2^H(λ) outside [1.7087, 1.7088]".into()
    })?;
    Ok("upper(5) = 16, upper(6) = 22, 2^H(1/4) < 1.7548, 1.7087 < 2^H(λ) < 1.7088".into())
}

fn oracle() -> Result<String> {
    for n in 1..=3 {
        let (a, b) = (enumerate_orders(n, None)?, brute_force_oracle(n)?);
        let set = |c: &OrderCensus| {
            c.orders
                .iter()
                .map(|o| o.to_line())
                .collect::<BTreeSet<_>>()
        };
        ensure(set(&a) == set(&b) && a.len() == b.len(), || {
            format!("n = {n}")
        })?;
    }
    Ok("n = 1, 2, 3 agree (2 orders at n = 3)".into())
}

fn trichotomy(bases: &Result<Vec<(usize, ComparativeOrder)>>) -> Result<String> {
    let bases = bases.as_ref().map_err(Clone::clone)?;
    let mut pairs = 0;
    for (n, o) in bases {
        let u = maclagan_utilities(*n)?;
        let special = maclagan_special_atom(*n)?;
        for p in critical_pairs(o) {
            let flippable = is_flippable(o, &p);
            let one_side = p.a.contains(special) != p.b.contains(special);
            let gap_one = u.utility(&p.b) - u.utility(&p.a) == BigUint::from(1u8);
            ensure(flippable == one_side && one_side == gap_one, || {
                format!("base {n}: pair {:?} ≺ {:?}", p.a, p.b)
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} critical pairs"))
}

fn budget_holds(o: &ComparativeOrder) -> bool {
    let pairs = flippable_pairs(o);
    let total: u64 = pairs.iter().map(|p| p.adjacencies).sum();
    let unions: HashSet<u32> = pairs.iter().map(|p| p.a().mask() | p.b().mask()).collect();
    total <= u64::from(full_mask(o.n())) && unions.len() == pairs.len()
}

fn adjacency_budget(
    small: &Result<Vec<OrderCensus>>,
    bases: &Result<Vec<(usize, ComparativeOrder)>>,
) -> Result<String> {
    let small = small.as_ref().map_err(Clone::clone)?;
    let bases = bases.as_ref().map_err(Clone::clone)?;
    let orders = small
        .iter()
        .flat_map(|c| &c.orders)
        .chain(bases.iter().map(|(_, o)| o));
    let mut count = 0;
    for o in orders {
        ensure(budget_holds(o), || o.to_line())?;
        count += 1;
    }
    Ok(format!("{count} orders"))
}
