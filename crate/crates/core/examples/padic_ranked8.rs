//! p-adic codes of the ranked eight-terminal tree, their decimal values, and
//! what dilation does to codes and to the tree.

use ultrametric::datasets;
use ultrametric::padic;

fn main() -> ultrametric::Result<()> {
    let d = datasets::ranked8();
    for p in [2u64, 3] {
        println!("p = {p}:");
        for (t, code) in padic::encode_all(&d, p)?.iter().enumerate() {
            println!(
                "  {:<3} {:<28} = {}",
                d.terminal_name(t),
                code.to_expression(),
                code.decimal_value()
            );
        }
        println!("  distinct values: {}", padic::check_uniqueness(&d, p)?);
    }

    let x1 = padic::encode(&d, 2, 0)?;
    println!("\nx1            {}", x1.to_expression());
    println!("x1 / p        {}", padic::dilate(&x1).to_expression());

    let (coarse, map) = padic::dilate_hierarchy(&d)?;
    println!("coarser tree  {}", coarse.to_newick());
    println!("terminal map  {map:?}");
    println!("chain of x1   {:?}", padic::cluster_chain(&d, 0)?);
    Ok(())
}
