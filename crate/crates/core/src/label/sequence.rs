/// Tokens of the square-free ternary sequence.
pub const TERNARY: [char; 3] = ['A', 'B', 'C'];

fn image(c: char) -> &'static [char] {
    match c {
        'A' => &['A', 'B', 'C'],
        'B' => &['A', 'C'],
        _ => &['B'],
    }
}

/// First `n` letters of the fixed point of `A -> ABC, B -> AC, C -> B`,
/// which is square-free.
pub fn squarefree_ternary(n: usize) -> Vec<char> {
    let mut seq = vec!['A', 'B', 'C'];
    let mut i = 1;
    while seq.len() < n {
        let next = image(seq[i]);
        seq.extend_from_slice(next);
        i += 1;
    }
    seq.truncate(n);
    seq
}
