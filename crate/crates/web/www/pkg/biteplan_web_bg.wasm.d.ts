/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const efficiency_curve: (a: number, b: number) => [number, number, number, number];
export const heatmap_rgba: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const plan_overlay_rgba: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const plan_text: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const plate_items: (a: number, b: number) => [number, number, number, number];
export const plate_names: () => [number, number];
export const plate_size: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
