/* tslint:disable */
/* eslint-disable */

/**
 * Cumulative bites after each action for the efficiency-only planner,
 * flattened as `[action, bites, action, bites, ...]`.
 */
export function efficiency_curve(name: string): Uint32Array;

/**
 * RGBA heatmap of one item's smoothed density, with the peak marked.
 */
export function heatmap_rgba(name: string, instance_id: number, sigma: number): Uint8Array;

/**
 * RGBA plate drawing with every item's planned skills overlaid.
 */
export function plan_overlay_rgba(name: string, density_thresh: number, entropy_thresh: number): Uint8Array;

/**
 * `label: kinds (peak, entropy)` per item under the given thresholds.
 */
export function plan_text(name: string, density_thresh: number, entropy_thresh: number): string;

/**
 * `id label category` per item, one line each.
 */
export function plate_items(name: string): string;

export function plate_names(): string[];

/**
 * `[width, height]` of a plate raster.
 */
export function plate_size(name: string): Uint32Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly efficiency_curve: (a: number, b: number) => [number, number, number, number];
    readonly heatmap_rgba: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly plan_overlay_rgba: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly plan_text: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly plate_items: (a: number, b: number) => [number, number, number, number];
    readonly plate_names: () => [number, number];
    readonly plate_size: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
