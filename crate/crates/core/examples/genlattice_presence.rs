//! Set-valued distances of a presence/absence table and the semilattice
//! they generate, with the clusters read off at each level.

use ultrametric::build_lattice;
use ultrametric::datasets;
use ultrametric::dissim::setvalued_table;

fn main() {
    let table = datasets::presence5();
    let t = setvalued_table(&table);

    println!("pairwise distances:");
    for (&(i, j), set) in t.pairs() {
        println!(
            "  d({}, {}) = {{{}}}",
            t.objects()[i],
            t.objects()[j],
            t.set_name(set)
        );
    }
    println!(
        "generalized ultrametric violations: {}",
        t.verify_generalized_ultrametric().len()
    );

    let lattice = build_lattice(&t);
    println!("\n{}", lattice.render_text(&t, &[1, 2, 3]));
}
