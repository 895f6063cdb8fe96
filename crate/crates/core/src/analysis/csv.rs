//! CSV artifacts. Floats are written with 17 significant digits so every
//! value round-trips exactly.

use std::io::Write;

use super::divergence::DivergenceRow;
use super::moments::MomentTrack;
use super::strong::ConvergenceReport;
use crate::error::Result;
use crate::scalar::Scalar;

pub const CONVERGENCE_HEADER: &str = "scheme,level_steps,dt,p,error,std_err,n_paths,excluded";
pub const MOMENTS_HEADER: &str = "scheme,steps,n,q,moment";
pub const DIVERGENCE_HEADER: &str = "scheme,steps,dt,threshold,n_paths,fraction";

fn num<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

pub fn write_convergence_csv<T: Scalar, W: Write>(reports: &[ConvergenceReport<T>], mut out: W) -> Result<()> {
    writeln!(out, "{CONVERGENCE_HEADER}")?;
    for report in reports {
        for row in &report.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                report.scheme,
                row.steps,
                num(row.dt),
                num(report.p),
                num(row.error),
                num(row.std_err),
                report.n_paths,
                row.excluded
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_moments_csv<T: Scalar, W: Write>(tracks: &[MomentTrack<T>], mut out: W) -> Result<()> {
    writeln!(out, "{MOMENTS_HEADER}")?;
    for track in tracks {
        for (n, &m) in track.series.iter().enumerate() {
            writeln!(out, "{},{},{},{},{}", track.scheme, track.steps, n, num(track.q), num(m))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_divergence_csv<T: Scalar, W: Write>(rows: &[DivergenceRow<T>], mut out: W) -> Result<()> {
    writeln!(out, "{DIVERGENCE_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.scheme,
            row.steps,
            num(row.dt),
            num(row.threshold),
            row.n_paths,
            num(row.fraction)
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::LevelRow;
    use crate::schemes::SchemeId;

    #[test]
    fn convergence_csv_layout() {
        let report = ConvergenceReport {
            scheme: SchemeId::Cts,
            p: 2.0,
            n_paths: 10,
            ref_steps: 64,
            rows: vec![LevelRow { steps: 4, dt: 0.25, error: 0.1, std_err: 0.01, excluded: 0 }],
            fitted_order: None,
            fitted_intercept: None,
            max_drift_increment: 0.5,
        };
        let mut buf = Vec::new();
        write_convergence_csv(&[report], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CONVERGENCE_HEADER);
        assert_eq!(
            lines[1],
            "CTS,4,2.5000000000000000e-1,2.0000000000000000e0,1.0000000000000001e-1,1.0000000000000000e-2,10,0"
        );
        let parsed: f64 = lines[1].split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(parsed, 0.1);
    }
}
