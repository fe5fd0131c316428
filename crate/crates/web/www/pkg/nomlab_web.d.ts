/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Models trained on a lexicon table (`base, class, base_count,
     * ity_count, ness_count`).
     */
    static fromTsv(text: string): Demo;
    /**
     * `{p_ity, p_ness, choice, curve: [[c, p_ness], ...]}` for `query` at
     * sensitivity `c`, with the curve over `points` log-spaced values in
     * `[lo, hi]`.
     */
    gcmScore(query: string, weighting: string, c: number, lo: number, hi: number, points: number): string;
    lexiconSize(): number;
    /**
     * `{choice, rule, best_ity, best_ness}`; the rule is the one that
     * decides the prediction.
     */
    mglPredict(base: string, weighting: string): string;
    /**
     * Models trained on the bundled lexicon.
     */
    constructor();
    /**
     * `[{base, class, d_ity, d_ness}, ...]`: nonces of one class, novel
     * with respect to the bundled word list and the lexicon.
     */
    nonces(_class: string, per_length: number, seed: number): string;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_fromTsv: (a: number, b: number) => [number, number, number];
    readonly demo_gcmScore: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly demo_lexiconSize: (a: number) => number;
    readonly demo_mglPredict: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly demo_new: () => [number, number, number];
    readonly demo_nonces: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
