//! Exponent tuples, the majorization order, and explicit single-transfer
//! chains between comparable tuples.
//!
//! Run with `cargo run --example transfer_chains`.

use stochastic_orders::majorization::{
    enumerate_tuples, transfer_chain, transfer_step, ExponentTuple,
};

fn main() {
    let p = ExponentTuple::new(vec![1, 1, 1, 1]).unwrap();
    let q = ExponentTuple::new(vec![4, 0, 0, 0]).unwrap();
    println!("({p}) below ({q}): {}", p.is_dominated_by(&q).unwrap());

    let chain = transfer_chain(&p, &q).unwrap();
    println!("transfer chain of {} steps:", chain.len() - 1);
    for (i, link) in chain.iter().enumerate() {
        let potential = link.chain_potential(&q).unwrap();
        println!("  step {i}: ({link})   remaining potential {potential}");
    }
    for w in chain.windows(2) {
        let (l1, l2) = transfer_step(&w[0], &w[1]).unwrap().unwrap();
        println!(
            "  ({}) -> ({}) moves one unit from slot {l2} to slot {l1}",
            w[0], w[1]
        );
    }

    // Single transfers are detected directly.
    let a = ExponentTuple::new(vec![1, 1, 1]).unwrap();
    let b = ExponentTuple::new(vec![2, 1, 0]).unwrap();
    println!(
        "({a}) -> ({b}) single transfer: {:?}",
        transfer_step(&a, &b).unwrap()
    );

    // All partitions of 6 into at most 4 parts, in dominance-friendly
    // descending order.
    println!("partitions of 6 into <= 4 parts:");
    for t in enumerate_tuples(4, 6) {
        println!("  ({t})");
    }
}
