//! CSV output. Undefined metrics are written as empty fields.

use std::io::{self, Write};

use super::labyrinth::{CampaignCell, TrialOutcome};
use super::metrics::{FrameScore, TrialMetrics};
use crate::fusion::Detection;
use crate::sim::Event;

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Per-frame counts and metrics, with a `total` footer row.
pub fn write_detection_csv<W: Write>(
    mut w: W,
    scores: &[FrameScore],
    totals: &TrialMetrics,
) -> io::Result<()> {
    writeln!(w, "frame,tp,fp,fn,precision,recall,f1")?;
    for s in scores {
        let m = TrialMetrics::from_totals(1, s.tp, s.fp, s.fn_);
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            s.frame,
            s.tp,
            s.fp,
            s.fn_,
            opt(m.precision),
            opt(m.recall),
            opt(m.f1)
        )?;
    }
    writeln!(
        w,
        "total,{},{},{},{},{},{}",
        totals.tp,
        totals.fp,
        totals.fn_,
        opt(totals.precision),
        opt(totals.recall),
        opt(totals.f1)
    )
}

pub fn write_fused_csv<W: Write>(mut w: W, fused: &[Detection]) -> io::Result<()> {
    writeln!(w, "frame,box_x1,box_y1,box_x2,box_y2,source_robot")?;
    for d in fused {
        let b = d.bbox;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            d.frame, b.x1, b.y1, b.x2, b.y2, d.source_robot.0
        )?;
    }
    Ok(())
}

pub fn write_events_csv<W: Write>(mut w: W, events: &[Event]) -> io::Result<()> {
    writeln!(w, "t,event_type,entity_id,x,y")?;
    for e in events {
        writeln!(
            w,
            "{:.2},{},{},{:.4},{:.4}",
            e.t, e.kind, e.entity, e.at.x, e.at.y
        )?;
    }
    Ok(())
}

pub fn write_campaign_csv<W: Write>(mut w: W, outcomes: &[TrialOutcome]) -> io::Result<()> {
    writeln!(
        w,
        "n_intruders,n_robots,trial,seed,caught,total,success_rate"
    )?;
    for o in outcomes {
        writeln!(
            w,
            "{},{},{},{},{},{},{:.4}",
            o.n_intruders, o.n_robots, o.trial, o.seed, o.caught, o.total, o.success_rate
        )?;
    }
    Ok(())
}

pub fn write_mean_success_csv<W: Write>(mut w: W, cells: &[Vec<CampaignCell>]) -> io::Result<()> {
    writeln!(w, "n_intruders,n_robots,trials,mean_success")?;
    for c in cells.iter().flatten() {
        writeln!(
            w,
            "{},{},{},{:.4}",
            c.n_intruders, c.n_robots, c.trials, c.mean_success
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undefined_metrics_are_blank() {
        let scores = [FrameScore {
            frame: 1,
            tp: 0,
            fp: 0,
            fn_: 0,
        }];
        let totals = TrialMetrics::from_scores(&scores);
        let mut out = Vec::new();
        write_detection_csv(&mut out, &scores, &totals).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "frame,tp,fp,fn,precision,recall,f1\n1,0,0,0,,,\ntotal,0,0,0,,,\n"
        );
    }
}
