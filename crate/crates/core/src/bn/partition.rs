use super::BayesNet;
use crate::error::Result;

/// Split of the non-side variables into blocks that are mutually
/// conditionally independent given `side_set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub side_set: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

/// Undirected moral graph: parent-child edges plus edges between co-parents.
/// Adjacency lists are sorted and deduplicated.
pub fn moral_graph(net: &BayesNet) -> Vec<Vec<usize>> {
    let n = net.num_vars();
    let mut adj = vec![Vec::new(); n];
    for v in 0..n {
        let pa = net.parents(v);
        for (i, &p) in pa.iter().enumerate() {
            adj[v].push(p);
            adj[p].push(v);
            for &q in &pa[i + 1..] {
                adj[p].push(q);
                adj[q].push(p);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Connected components of the moral graph after deleting `side_set`.
///
/// The ancestral set of all variables is the whole network, so this moralizes
/// the full graph. Blocks are sorted internally and ordered by smallest member.
pub fn conditional_partition(net: &BayesNet, side_set: &[usize]) -> Result<Partition> {
    net.check_ids(side_set)?;
    let n = net.num_vars();
    let mut removed = vec![false; n];
    for &y in side_set {
        removed[y] = true;
    }
    let adj = moral_graph(net);
    let mut component = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if removed[start] || component[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut block = Vec::new();
        let mut stack = vec![start];
        component[start] = id;
        while let Some(v) = stack.pop() {
            block.push(v);
            for &u in &adj[v] {
                if !removed[u] && component[u] == usize::MAX {
                    component[u] = id;
                    stack.push(u);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    let mut side: Vec<usize> = side_set.to_vec();
    side.sort_unstable();
    side.dedup();
    Ok(Partition { side_set: side, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{binary_vars, chain, fig4a, fig4b, BayesNet, Cpt};

    #[test]
    fn fork_splits_given_root() {
        let net = fig4a(0.1, 0.1);
        let y = net.var_by_name("Y").unwrap();
        let p = conditional_partition(&net, &[y]).unwrap();
        let x1 = net.var_by_name("X1").unwrap();
        let x2 = net.var_by_name("X2").unwrap();
        assert_eq!(p.blocks, vec![vec![x1], vec![x2]]);
    }

    #[test]
    fn chain_splits_given_middle() {
        let net = fig4b(0.1, 0.2);
        let y = net.var_by_name("Y").unwrap();
        let p = conditional_partition(&net, &[y]).unwrap();
        assert_eq!(p.blocks.len(), 2);
        assert_eq!(p.blocks.concat().len(), 2);
    }

    #[test]
    fn no_separator_gives_one_block() {
        let net = chain(3, 0.1);
        let p = conditional_partition(&net, &[]).unwrap();
        assert_eq!(p.blocks, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn collider_is_married() {
        let table = vec![vec![0.5, 0.5]; 4];
        let net = BayesNet::new(
            binary_vars(&["a", "b", "c"]),
            vec![
                Cpt::root(0, vec![0.5, 0.5]),
                Cpt::root(1, vec![0.5, 0.5]),
                Cpt::new(2, vec![0, 1], table),
            ],
        )
        .unwrap();
        assert_eq!(conditional_partition(&net, &[2]).unwrap().blocks, vec![vec![0, 1]]);
        assert!(conditional_partition(&net, &[9]).is_err());
    }
}
