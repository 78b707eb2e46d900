//! Tab-separated output with `#` header lines.

use std::fmt::Write;

use crate::gf2::Gf2Matrix;
use crate::join::JoinInstance;
use crate::sfh::BlockTable;

pub const TOOL: &str = concat!("bsfh ", env!("CARGO_PKG_VERSION"));

pub fn header(command: &str, seed: u64) -> String {
    format!("# tool\t{TOOL}\n# command\t{command}\n# seed\t{seed}\n")
}

/// `I<TAB>J<TAB>dim` for the nonzero blocks.
pub fn blocks_tsv(blocks: &BlockTable) -> String {
    let mut s = String::from("I\tJ\tdim\n");
    for ((i, j), d) in blocks {
        if *d > 0 {
            writeln!(s, "{i}\t{j}\t{d}").unwrap();
        }
    }
    s
}

/// One `row<TAB>col` line per nonzero entry, after a `# matrix` line with
/// the shape.
pub fn matrix_triplets(name: &str, m: &Gf2Matrix) -> String {
    let mut s = format!("# matrix\t{name}\t{}x{}\n", m.rows(), m.cols());
    let mut entries = m.entries();
    entries.sort_unstable_by_key(|&(r, c)| (c, r));
    for (r, c) in entries {
        writeln!(s, "{r}\t{c}\t1").unwrap();
    }
    s
}

fn basis(s: &mut String, name: &str, labels: &[String]) {
    writeln!(s, "# basis\t{name}\t{}", labels.len()).unwrap();
    for (i, l) in labels.iter().enumerate() {
        writeln!(s, "{i}\t{l}").unwrap();
    }
}

/// Domain and codomain bases, then the map as triplets.
pub fn join_tsv(inst: &JoinInstance) -> String {
    let mut s = format!("# join\t{}\t{}\t{}\n", inst.u.name, inst.m.name, inst.v.name);
    basis(&mut s, "domain", inst.domain.labels());
    basis(&mut s, "codomain", inst.codomain.labels());
    s.push_str(&matrix_triplets("map", &inst.map));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::canonical::z1;
    use crate::sfh::homology_blocks;
    use crate::strands::AlgebraModel;

    #[test]
    fn z1_block_rows() {
        let am = AlgebraModel::new(&z1()).unwrap();
        let t = blocks_tsv(&homology_blocks(&am).unwrap());
        assert_eq!(t, "I\tJ\tdim\n{}\t{}\t1\n{1}\t{1}\t2\n");
    }

    #[test]
    fn triplets_are_sorted_by_column() {
        let mut m = Gf2Matrix::zero(2, 2);
        m.toggle(1, 0);
        m.toggle(0, 1);
        assert_eq!(matrix_triplets("m", &m), "# matrix\tm\t2x2\n1\t0\t1\n0\t1\t1\n");
        assert!(header("blocks", 3).ends_with("# seed\t3\n"));
    }
}
