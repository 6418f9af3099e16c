/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_relaxed_free: (a: number, b: number) => void;
export const kernelConstant: () => number;
export const kernelCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const relaxWall: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const relaxed_energy: (a: number) => number;
export const relaxed_iterations: (a: number) => number;
export const relaxed_m1: (a: number) => [number, number];
export const relaxed_m2: (a: number) => [number, number];
export const relaxed_prediction: (a: number) => number;
export const relaxed_x: (a: number) => [number, number];
export const wLandscape: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
