/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const counterexampleProfiles: (a: number, b: number, c: number) => [number, number, number, number];
export const orbit: (a: number, b: number, c: number) => [number, number, number, number];
export const periodCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const shockJump: (a: number) => number;
export const shockOnset: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
