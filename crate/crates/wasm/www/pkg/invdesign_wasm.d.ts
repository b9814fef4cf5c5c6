/* tslint:disable */
/* eslint-disable */

export function counterexampleProfiles(n: number, half_width: number, t: number): Float64Array;

export function orbit(q0: number, p0: number, t_max: number): Float64Array;

export function periodCurve(n: number, p_min: number, p_max: number): Float64Array;

export function shockJump(t: number): number;

export function shockOnset(): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly counterexampleProfiles: (a: number, b: number, c: number) => [number, number, number, number];
    readonly orbit: (a: number, b: number, c: number) => [number, number, number, number];
    readonly periodCurve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly shockJump: (a: number) => number;
    readonly shockOnset: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
