use statrs::function::beta::beta_reg;

/// Two-sided tail P(|T| >= |t|) of Student's t with `df` degrees of freedom,
/// computed as the regularised incomplete beta I_{df/(df+t^2)}(df/2, 1/2).
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_tail() {
        // df = 1 is Cauchy: P(|T| > t) = 1 - 2 atan(t) / pi
        for t in [0.1, 1.0, 3.0, 40.0] {
            let expect = 1.0 - 2.0 * f64::atan(t) / std::f64::consts::PI;
            assert!((student_t_two_sided(t, 1.0) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn two_degrees_of_freedom() {
        // df = 2: P(|T| > t) = 1 - t / sqrt(2 + t^2)
        for t in [0.05f64, 0.7, 2.0, 15.0] {
            let expect = 1.0 - t / (2.0 + t * t).sqrt();
            assert!((student_t_two_sided(t, 2.0) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_statistic() {
        assert_eq!(student_t_two_sided(0.0, 10.0), 1.0);
    }
}
