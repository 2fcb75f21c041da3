// Occupancy-grid decoding: the server sends a run-length-encoded bitset of
// the 3D voxel grid (C order over dims [nx, ny, nz], alternating runs that
// start with a free run, possibly of length zero).

export function decodeRle(dims: [number, number, number], rle: number[]): Uint8Array {
  const total = dims[0] * dims[1] * dims[2];
  const cells = new Uint8Array(total);
  let pos = 0;
  let value = 0;
  for (const run of rle) {
    if (run < 0 || pos + run > total) {
      throw new Error(`malformed rle: run ${run} at offset ${pos} of ${total}`);
    }
    if (value) cells.fill(1, pos, pos + run);
    pos += run;
    value = value ? 0 : 1;
  }
  if (pos !== total) {
    throw new Error(`malformed rle: covers ${pos} of ${total} cells`);
  }
  return cells;
}

export const CELL_VOID = 0; // nothing in the column at all
export const CELL_FLOOR = 1; // only the ground layer is occupied
export const CELL_OBSTACLE = 2; // something above the ground layer

/** Collapse the 3D grid into a top-down map: void / floor / obstacle. */
export function topDownOccupancy(
  dims: [number, number, number],
  cells: Uint8Array,
): Uint8Array {
  const [nx, ny, nz] = dims;
  const out = new Uint8Array(nx * ny);
  for (let i = 0; i < nx; i++) {
    for (let j = 0; j < ny; j++) {
      const base = (i * ny + j) * nz;
      let kind = CELL_VOID;
      if (cells[base]) kind = CELL_FLOOR;
      for (let k = 1; k < nz; k++) {
        if (cells[base + k]) {
          kind = CELL_OBSTACLE;
          break;
        }
      }
      out[i * ny + j] = kind;
    }
  }
  return out;
}
