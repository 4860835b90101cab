//! Bit-rate selection by MMD-SA and MAD-SA on a 4-connection, 4-step
//! prediction matrix.

use eonplan::heuristics::{demand_order, select_mad, select_mmd};
use eonplan::traffic::PredictionMatrix;
use eonplan::ConnId;

fn main() {
    let rows = [[6., 5., 2., 1.], [2., 4., 5., 3.], [4., 5., 6., 2.], [2., 3., 1., 5.]];
    let pred = PredictionMatrix {
        epoch: 0,
        rows: rows.iter().enumerate().map(|(c, r)| (ConnId(c), r.to_vec())).collect(),
    };
    for (c, r) in &pred.rows {
        println!("c{}  {:?}", c.0 + 1, r);
    }
    let mmd = select_mmd(&pred);
    let mad = select_mad(&pred);
    println!("MMD-SA {:?}", mmd.values());
    println!("MAD-SA {:?} (step {:?})", mad.values(), mad.meta);
    let order: Vec<usize> = demand_order(&mmd).iter().map(|c| c.0 + 1).collect();
    println!("MMD-SA provisioning order {order:?}");
}
