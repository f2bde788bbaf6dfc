//! Parameter sweeps `param:start:stop:count[:log]` and their Cartesian product.

use crate::error::{usage, CliResult};
use crate::settings::{normalize_key, Entry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn parse(entry: &Entry, sweepable: &[&str]) -> CliResult<Self> {
        let bad = |why: &str| usage(format!("{}: sweep '{}': {why}", entry.origin, entry.raw));
        let parts: Vec<&str> = entry.raw.split(':').map(str::trim).collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad("expected param:start:stop:count[:log]"));
        }
        let parameter = normalize_key(parts[0]);
        if !sweepable.contains(&parameter.as_str()) {
            return Err(bad(&format!("cannot sweep '{parameter}' here; sweepable: {}", sweepable.join(", "))));
        }
        let number = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
        let start = number(parts[1]).ok_or_else(|| bad("start is not a finite number"))?;
        let stop = number(parts[2]).ok_or_else(|| bad("stop is not a finite number"))?;
        let count: usize = parts[3].parse().map_err(|_| bad("count is not an integer"))?;
        if count == 0 {
            return Err(bad("count must be >= 1"));
        }
        let scale = match parts.get(4) {
            None | Some(&"linear") => Scale::Linear,
            Some(&"log") => Scale::Log,
            Some(_) => return Err(bad("scale must be 'linear' or 'log'")),
        };
        if scale == Scale::Log && (start <= 0.0 || stop <= 0.0) {
            return Err(bad("log sweeps need positive endpoints"));
        }
        Ok(Self { parameter, start, stop, count, scale })
    }

    pub fn values(&self) -> Vec<f64> {
        grid(self.start, self.stop, self.count, self.scale)
    }
}

/// `count` points from `start` to `stop` inclusive; a single point sits at `start`.
pub fn grid(start: f64, stop: f64, count: usize, scale: Scale) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == 0 {
                return start;
            }
            if i == count - 1 {
                return stop;
            }
            let t = i as f64 / last;
            match scale {
                Scale::Linear => start + (stop - start) * t,
                Scale::Log => (start.ln() + (stop.ln() - start.ln()) * t).exp(),
            }
        })
        .collect()
}

/// One assignment per grid point, first sweep outermost.
pub fn product(specs: &[SweepSpec]) -> Vec<Vec<(String, f64)>> {
    specs.iter().fold(vec![Vec::new()], |acc, spec| {
        let values = spec.values();
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((spec.parameter.clone(), v));
                    p
                })
            })
            .collect()
    })
}

pub fn check_distinct(specs: &[SweepSpec]) -> CliResult<()> {
    for (i, s) in specs.iter().enumerate() {
        if specs[..i].iter().any(|t| t.parameter == s.parameter) {
            return Err(usage(format!("parameter '{}' is swept twice", s.parameter)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::Origin;

    fn entry(raw: &str) -> Entry {
        Entry { raw: raw.into(), origin: Origin::Flag }
    }

    #[test]
    fn linear_and_log_grids_hit_endpoints() {
        assert_eq!(grid(0.0, 1.0, 5, Scale::Linear), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = grid(0.01, 100.0, 5, Scale::Log);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[4], 100.0);
        assert!((g[2] - 1.0).abs() < 1e-14);
        assert_eq!(grid(3.0, 7.0, 1, Scale::Linear), vec![3.0]);
    }

    #[test]
    fn parses_specs() {
        let s = SweepSpec::parse(&entry("alpha:0:1e-2:3"), &["alpha"]).unwrap();
        assert_eq!(s.values(), vec![0.0, 5e-3, 1e-2]);
        let s = SweepSpec::parse(&entry("dp_min:0.1:1:2:log"), &["dp-min"]).unwrap();
        assert_eq!(s.scale, Scale::Log);
    }

    #[test]
    fn rejects_bad_specs() {
        for raw in ["alpha:0:1", "alpha:0:1:0", "mass:0:1:2", "alpha:0:1:2:log", "alpha:x:1:2", "alpha:0:1:2:cubic"] {
            assert!(SweepSpec::parse(&entry(raw), &["alpha"]).is_err(), "{raw}");
        }
    }

    #[test]
    fn product_orders_first_sweep_outermost() {
        let a = SweepSpec { parameter: "a".into(), start: 0.0, stop: 1.0, count: 2, scale: Scale::Linear };
        let b = SweepSpec { parameter: "b".into(), start: 5.0, stop: 7.0, count: 3, scale: Scale::Linear };
        let p = product(&[a.clone(), b]);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![("a".into(), 0.0), ("b".into(), 5.0)]);
        assert_eq!(p[1], vec![("a".into(), 0.0), ("b".into(), 6.0)]);
        assert_eq!(p[3], vec![("a".into(), 1.0), ("b".into(), 5.0)]);
        assert_eq!(product(&[]), vec![Vec::new()]);
        assert!(check_distinct(&[a.clone(), a]).is_err());
    }
}
