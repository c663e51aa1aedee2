//! Sweep grids given as `start:stop:step` (inclusive of `stop`) or as a
//! single bare value.

const MAX_POINTS: usize = 100_000;

pub fn parse(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => {
            let x = parse_f64(parts[0])?;
            Ok(vec![x])
        }
        3 => {
            let start = parse_f64(parts[0])?;
            let stop = parse_f64(parts[1])?;
            let step = parse_f64(parts[2])?;
            if step <= 0.0 {
                return Err(format!("grid step must be positive, got {step}"));
            }
            if stop < start {
                return Err(format!("grid runs backwards: {start} > {stop}"));
            }
            if (stop - start) / step > MAX_POINTS as f64 {
                return Err(format!("grid has more than {MAX_POINTS} points"));
            }
            let mut values = Vec::new();
            for j in 0.. {
                let x = start + j as f64 * step;
                // the endpoint is part of the grid even when accumulated
                // steps overshoot it by an ulp; clamp so downstream range
                // checks see exactly `stop`
                if x > stop + step * 1e-9 {
                    break;
                }
                values.push(if x > stop { stop } else { x });
            }
            Ok(values)
        }
        _ => Err(format!("expected VALUE or START:STOP:STEP, got {text:?}")),
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !x.is_finite() {
        return Err(format!("grid values must be finite, got {s:?}"));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_count_and_endpoint() {
        let g = parse("0:1:0.05").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn endpoint_is_clamped_not_overshot() {
        let g = parse("0.05:0.45:0.05").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(*g.last().unwrap(), 0.45);
    }

    #[test]
    fn single_value() {
        assert_eq!(parse("0.25").unwrap(), vec![0.25]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse("0:1").is_err());
        assert!(parse("a:b:c").is_err());
        assert!(parse("0:1:0").is_err());
        assert!(parse("1:0:0.1").is_err());
        assert!(parse("0:1e9:1e-9").is_err());
        assert!(parse("nan").is_err());
    }
}
