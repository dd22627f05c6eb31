// REST payload shapes, mirroring the service's documented JSON schema.

export interface GeometryJson {
    kind: string;
    coordinates: unknown;
}

export interface MetricsJson {
    w_d: number;
    t_d: number;
    b_d: number;
    s_p: number;
    s_d: number;
    g_d: number;
}

export interface FlagsJson {
    t_d_available: boolean;
    number_compared: boolean;
    g_d_available: boolean;
}

export interface ResultJson {
    id: number;
    rank: number;
    name_historical: string;
    name_normalized: string;
    geometry: GeometryJson;
    point: [number, number];
    score: number | null;
    score_error: string | null;
    metrics: MetricsJson;
    flags: FlagsJson;
    gazetteer: string;
    source: string;
    period: [number, number, number, number];
    accuracy_m: number;
    precision_class: 'precise' | 'rough';
}

export interface GeocodingResponse {
    query: { address: string; date: string | null; precision: boolean };
    results: ResultJson[];
    ruid?: string;
}

export interface ResultRecordJson {
    record_id: number;
    row_index: number;
    query: Record<string, unknown>;
    result: ResultJson;
    created_at: string;
    edited: boolean;
}

export interface ResultSetJson {
    ruid: string;
    records: ResultRecordJson[];
}

export interface EditPayloadJson {
    geometry?: GeometryJson;
    period?: [number, number, number, number] | string;
    historical_name?: string;
    normalized_name?: string;
    note?: string;
}
