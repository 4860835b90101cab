//! From 5-minute samples to 30-minute interval maxima, sliding training
//! windows and a persistence forecast.

use eonplan::traffic::{intervalize, make_windows, naive_predict, FluctuationSeries};
use eonplan::ConnId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples: Vec<f64> = (0..60).map(|i| 1000.0 + 400.0 * ((i as f64) / 9.0).sin()).collect();
    let series = FluctuationSeries { conn: ConnId(0), samples };
    let iv = intervalize(&series, 30)?;
    println!("{} intervals of k={}", iv.len(), iv.k);
    for (t, m) in iv.interval_max.iter().enumerate() {
        println!("  x{t} max {m:.1}");
    }
    let ds = make_windows(&iv, 3, 2)?;
    println!("{} windows (r=3, u=2)", ds.windows.len());
    for w in &ds.windows {
        println!("  t={} target {:?}", w.t, w.target.iter().map(|v| v.round()).collect::<Vec<_>>());
    }
    println!("persistence forecast {:?}", naive_predict(&iv.interval_max, 2)?);
    Ok(())
}
