use tav_core::det::det_exact;
use tav_core::fox::{wada_matrix, Representation, TwistedSetup};
use tav_core::group::FiniteGroup;
use tav_core::knot::{diagrams, wirtinger_from_pd};

fn main() {
    for n in 2..=3usize {
        let pres = wirtinger_from_pd(&diagrams::trefoil()).unwrap();
        let g = FiniteGroup::cyclic(n);
        // Z_n quotient: every Wirtinger generator maps to the same generator
        let gen = g.index_of(&g.gens[0]).unwrap();
        let images = vec![gen; pres.generators];
        let setup = TwistedSetup::new(&pres, &g, &images, Representation::Regular).unwrap();
        let (num, den) = wada_matrix(&setup);
        let nd = det_exact(&num).unwrap();
        println!("n={n} numerator det = {}", nd.unit_normalize().poly);
        println!("     denominator  = {den}");
    }
}
