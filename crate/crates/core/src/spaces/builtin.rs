use super::{validate_space, FiniteSpace, ProductIndex, SpaceFamily};
use crate::error::{Error, Result};

/// `p, q, r, …` for up to eleven points, `x0, x1, …` beyond.
pub(crate) fn labels(n: usize) -> Vec<String> {
    if n <= 11 {
        (0..n).map(|i| char::from(b'p' + i as u8).to_string()).collect()
    } else {
        (0..n).map(|i| format!("x{i}")).collect()
    }
}

fn positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams(format!("{what} needs at least one point")));
    }
    Ok(())
}

fn from_fn(n: usize, d: impl Fn(usize, usize) -> f64) -> Result<FiniteSpace> {
    let matrix = (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect();
    validate_space(labels(n), matrix)
}

pub fn discrete(n: usize) -> Result<FiniteSpace> {
    scaled_discrete(n, 1.0)
}

pub fn indiscrete(n: usize) -> Result<FiniteSpace> {
    scaled_discrete(n, 0.0)
}

/// `a · d_D`.
pub fn scaled_discrete(n: usize, a: f64) -> Result<FiniteSpace> {
    positive(n, "scaled_discrete")?;
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidParams(format!("scale must be finite and nonnegative, got {a}")));
    }
    from_fn(n, |i, j| if i == j { 0.0 } else { a })
}

/// `|x − y|` on the given reals, labelled by their values.
pub fn euclid_points(xs: &[f64]) -> Result<FiniteSpace> {
    positive(xs.len(), "euclid_points")?;
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParams("coordinates must be finite".into()));
    }
    let matrix = xs.iter().map(|x| xs.iter().map(|y| (x - y).abs()).collect()).collect();
    validate_space(xs.iter().map(|x| x.to_string()).collect(), matrix)
}

/// `d(i, j) = 0` if `i ≤ j`, else 1: a quasi-metric whose conjugate is its reverse.
pub fn oneway(n: usize) -> Result<FiniteSpace> {
    positive(n, "oneway")?;
    from_fn(n, |i, j| if i <= j { 0.0 } else { 1.0 })
}

/// Two-point members on products, member `j` at distance `a_j`.
pub fn two_point_pq(a: &[f64]) -> Result<SpaceFamily> {
    let members = a.iter().map(|&x| scaled_discrete(2, x)).collect::<Result<_>>()?;
    SpaceFamily::products(members)
}

/// Members `a_j · d_D` on the shared points `p, q`.
pub fn scaled_discrete_family(a: &[f64]) -> Result<SpaceFamily> {
    let members = a.iter().map(|&x| scaled_discrete(2, x)).collect::<Result<_>>()?;
    SpaceFamily::sets(members)
}

fn grid_points(values: &[f64], n: usize) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    if values.is_empty() || n == 0 {
        return Err(Error::InvalidParams("lu_grid needs values and n ≥ 1".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("grid values must be finite".into()));
    }
    if (1..values.len()).any(|i| values[..i].contains(&values[i])) {
        return Err(Error::InvalidParams("grid values must be distinct".into()));
    }
    let idx = ProductIndex::new(vec![values.len(); n], super::DEFAULT_PRODUCT_CAP)?;
    let coords: Vec<Vec<f64>> = (0..idx.len())
        .map(|k| idx.coords(k).into_iter().map(|c| values[c]).collect())
        .collect();
    let names: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let factors: Vec<&[String]> = vec![&names; n];
    Ok((idx.labels(&factors), coords))
}

/// `d_i(x, y) = min(1, max(max_{j≠i} (x_j − y_j)⁺, (y_i − x_i)⁺))` on the grid
/// `values^n`, with `coordinate` 1-based. When every value lies in `[0, 1)`,
/// `d_i(0_n, a) = a_i`.
pub fn lu_grid(values: &[f64], coordinate: usize, n: usize) -> Result<FiniteSpace> {
    if !(1..=n).contains(&coordinate) {
        return Err(Error::InvalidParams(format!("coordinate {coordinate} outside 1..={n}")));
    }
    let (points, coords) = grid_points(values, n)?;
    let i = coordinate - 1;
    let d = |x: &[f64], y: &[f64]| -> f64 {
        let mut m = (y[i] - x[i]).max(0.0);
        for j in (0..n).filter(|&j| j != i) {
            m = m.max((x[j] - y[j]).max(0.0));
        }
        m.min(1.0)
    };
    let matrix = coords.iter().map(|x| coords.iter().map(|y| d(x, y)).collect()).collect();
    validate_space(points, matrix)
}

/// The `n` members `lu_grid(values, i, n)`, `i = 1..=n`, on one set.
pub fn lu_family(values: &[f64], n: usize) -> Result<SpaceFamily> {
    let members = (1..=n).map(|i| lu_grid(values, i, n)).collect::<Result<_>>()?;
    SpaceFamily::sets(members)
}

fn count(params: &[f64], k: usize, name: &str) -> Result<usize> {
    let v = params[k];
    if v.fract() != 0.0 || !(1.0..=1e6).contains(&v) {
        return Err(Error::InvalidParams(format!("{name}: parameter {} must be a positive integer, got {v}", k + 1)));
    }
    Ok(v as usize)
}

fn expect_len(params: &[f64], n: usize, name: &str) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidParams(format!("{name} takes {n} parameter(s), got {}", params.len())));
    }
    Ok(())
}

/// A named space written as `name(p1,p2,…)`:
///
/// ```text
/// discrete(n) | indiscrete(n) | scaled_discrete(n,a) | euclid_points(x1,…)
///     | oneway(n) | oneway_reversed(n) | lu_grid(i,n,v1,…)
/// ```
pub fn builtin_space(text: &str) -> Result<FiniteSpace> {
    let text = text.trim();
    let (name, params) = match text.find('(') {
        Some(open) => {
            let Some(body) = text[open + 1..].strip_suffix(')') else {
                return Err(Error::InvalidParams(format!("missing ')' in {text:?}")));
            };
            let params = body
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidParams(format!("{s:?} is not a number"))))
                .collect::<Result<Vec<f64>>>()?;
            (text[..open].trim().to_ascii_lowercase(), params)
        }
        None => (text.to_ascii_lowercase(), Vec::new()),
    };
    match name.as_str() {
        "discrete" => {
            expect_len(&params, 1, &name)?;
            discrete(count(&params, 0, &name)?)
        }
        "indiscrete" => {
            expect_len(&params, 1, &name)?;
            indiscrete(count(&params, 0, &name)?)
        }
        "scaled_discrete" => {
            expect_len(&params, 2, &name)?;
            scaled_discrete(count(&params, 0, &name)?, params[1])
        }
        "euclid_points" => euclid_points(&params),
        "oneway" => {
            expect_len(&params, 1, &name)?;
            oneway(count(&params, 0, &name)?)
        }
        "oneway_reversed" => {
            expect_len(&params, 1, &name)?;
            Ok(oneway(count(&params, 0, &name)?)?.reversed())
        }
        "lu_grid" => {
            if params.len() < 3 {
                return Err(Error::InvalidParams("lu_grid takes i, n and at least one value".into()));
            }
            lu_grid(&params[2..], count(&params, 0, &name)?, count(&params, 1, &name)?)
        }
        _ => Err(Error::InvalidParams(format!("unknown builtin space {name:?}"))),
    }
}
