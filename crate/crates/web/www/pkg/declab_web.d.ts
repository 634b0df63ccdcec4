/* tslint:disable */
/* eslint-disable */

/**
 * Two sectors with `λ = ±coupling`, `H_S = ω σ₃/2`, starting from
 * `|+⟩⟨+|`: `[t, ‖offdiag‖₂, ‖offdiag‖₁, …]`.
 */
export function az_decay(kind: string, p1: number, p2: number, p3: number, coupling: number, omega: number, t_max: number, count: number): Float64Array;

/**
 * `[t₀, |χ(t₀)|, t₁, |χ(t₁)|, …]` for a gaussian (`p1 = s`), uniform
 * (`[p1, p2]`) or bump (`[p1, p2]`, steepness `p3`) density.
 */
export function chi_curve(kind: string, p1: number, p2: number, p3: number, t_max: number, count: number): Float64Array;

/**
 * Spin in the field `a·σ + λxσ₃` with a Gaussian position density of
 * width `s`. Returns `[Mp₁, Mp₂, Mp₃]` followed by `[t, p₁, p₂, p₃]` per
 * time point.
 */
export function spin_trajectory(a1: number, a2: number, a3: number, lambda: number, s: number, px: number, py: number, pz: number, t_max: number, count: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly az_decay: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly chi_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly spin_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
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
