/**
 * Client-side mirror of the level order and dominance encoding, used to
 * pre-validate the observation form before anything reaches the service.
 * The server stays authoritative; this only catches obvious conflicts early.
 */

export type Coord = { r: number; c: number };

export type Relation = "lower" | "equal" | "higher" | "incomparable";

/** Relation of `a` with respect to `b` on a grid of competence levels. */
export function relate(a: Coord, b: Coord, rowsOrdered: boolean): Relation {
  if (a.r === b.r && a.c === b.c) return "equal";
  if (rowsOrdered) {
    if (a.r >= b.r && a.c >= b.c) return "higher";
    if (a.r <= b.r && a.c <= b.c) return "lower";
  } else if (a.r === b.r) {
    return a.c > b.c ? "higher" : "lower";
  }
  return "incomparable";
}

const key = (coord: Coord): string => `${coord.r}:${coord.c}`;

export function parseKey(k: string): Coord {
  const [r, c] = k.split(":");
  return { r: Number(r), c: Number(c) };
}

export type CellValues = Map<string, 0 | 1>;

function allCoords(nRows: number, nCols: number): Coord[] {
  const coords: Coord[] = [];
  for (let r = 1; r <= nRows; r++) for (let c = 1; c <= nCols; c++) coords.push({ r, c });
  return coords;
}

/**
 * Cell values implied by achieving a level: every lower-or-equal cell is
 * shown, every strictly higher cell is not, incomparable cells stay out.
 */
export function achievedDelta(
  nRows: number,
  nCols: number,
  rowsOrdered: boolean,
  achieved: Coord,
): CellValues {
  const delta: CellValues = new Map();
  for (const coord of allCoords(nRows, nCols)) {
    const rel = relate(coord, achieved, rowsOrdered);
    if (rel === "lower" || rel === "equal") delta.set(key(coord), 1);
    else if (rel === "higher") delta.set(key(coord), 0);
  }
  return delta;
}

export function observationDelta(
  nRows: number,
  nCols: number,
  rowsOrdered: boolean,
  obs: { kind: "achieved" | "obs"; r: number; c: number; value?: number | null },
): CellValues {
  if (obs.kind === "achieved") {
    return achievedDelta(nRows, nCols, rowsOrdered, { r: obs.r, c: obs.c });
  }
  return new Map([[key({ r: obs.r, c: obs.c }), (obs.value ?? 0) === 1 ? 1 : 0]]);
}

/**
 * Cells where `delta` contradicts `current`, either directly (same cell,
 * opposite value) or through the order (a success strictly above a failure).
 */
export function conflictsWith(
  current: CellValues,
  delta: CellValues,
  rowsOrdered: boolean,
): Coord[] {
  const clashes: Coord[] = [];
  for (const [k, value] of delta) {
    const existing = current.get(k);
    if (existing !== undefined && existing !== value) {
      clashes.push(parseKey(k));
      continue;
    }
    for (const [otherKey, otherValue] of current) {
      if (otherValue === value) continue;
      const [one, zero] = value === 1 ? [k, otherKey] : [otherKey, k];
      if (relate(parseKey(one), parseKey(zero), rowsOrdered) === "higher") {
        clashes.push(parseKey(k));
        break;
      }
    }
  }
  return clashes;
}

/** Merge without conflict checking; caller validates first. */
export function mergeValues(current: CellValues, delta: CellValues): CellValues {
  const merged: CellValues = new Map(current);
  for (const [k, v] of delta) merged.set(k, v);
  return merged;
}
