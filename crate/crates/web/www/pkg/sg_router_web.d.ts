/* tslint:disable */
/* eslint-disable */

/**
 * Row-major coverage probabilities, one row per distance.
 */
export function coverage_map(band: string, density: number, rf_gamma_db: number, distances: Float64Array, powers_dbm: Float64Array): Float64Array;

/**
 * Hop-distance density sampled at `points` evenly spaced distances.
 * Returns interleaved `[rho0, f0, rho1, f1, ...]`.
 */
export function distance_pdf(kind: string, density: number, separation: number, points: number): Float64Array;

/**
 * For each power in dBm: `[ideal_hops, ideal_bps, stepwise_hops, analytic_bps]`.
 */
export function throughput_curve(band: string, density: number, distance: number, powers_dbm: Float64Array): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly coverage_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly distance_pdf: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly throughput_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
