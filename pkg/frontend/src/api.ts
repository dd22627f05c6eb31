// Typed client for the geocoding service. The only state-changing calls a
// browser session ever makes are POST /batch (persists its own result set)
// and POST .../edit — nothing here can touch source gazetteers.

import { EditPayloadJson, GeocodingResponse, ResultSetJson } from './types.js';

export interface GeocodeParams {
    address: string;
    date?: string;
    maxresults?: number;
    maxdist?: number;
    precision?: boolean;
    scoring?: string;
    persist?: boolean;
}

export class ApiError extends Error {
    constructor(
        readonly status: number,
        message: string,
    ) {
        super(message);
    }
}

async function checked(response: Response): Promise<Response> {
    if (!response.ok) {
        let detail = response.statusText;
        try {
            const body = await response.json();
            if (body && typeof body.error === 'string') detail = body.error;
        } catch {
            // non-JSON error body; keep the status text
        }
        throw new ApiError(response.status, detail);
    }
    return response;
}

export class Api {
    constructor(readonly baseUrl: string = '') {}

    async geocode(params: GeocodeParams): Promise<GeocodingResponse> {
        const search = new URLSearchParams({ address: params.address });
        if (params.date) search.set('date', params.date);
        if (params.maxresults !== undefined) search.set('maxresults', String(params.maxresults));
        if (params.maxdist !== undefined) search.set('maxdist', String(params.maxdist));
        if (params.precision) search.set('precision', 'true');
        if (params.scoring) search.set('scoring', params.scoring);
        if (params.persist) search.set('persist', 'true');
        const response = await checked(await fetch(`${this.baseUrl}/geocoding?${search}`));
        return response.json();
    }

    async batch(csvText: string): Promise<{ csv: string; ruid: string }> {
        const response = await checked(
            await fetch(`${this.baseUrl}/batch`, {
                method: 'POST',
                headers: { 'content-type': 'text/csv' },
                body: csvText,
            }),
        );
        return { csv: await response.text(), ruid: response.headers.get('X-Ruid') ?? '' };
    }

    async results(ruid: string): Promise<ResultSetJson> {
        const response = await checked(await fetch(`${this.baseUrl}/results/${ruid}`));
        return response.json();
    }

    async edit(ruid: string, recordId: number, payload: EditPayloadJson): Promise<number> {
        const response = await checked(
            await fetch(`${this.baseUrl}/results/${ruid}/${recordId}/edit`, {
                method: 'POST',
                headers: { 'content-type': 'application/json' },
                body: JSON.stringify(payload),
            }),
        );
        return (await response.json()).new_object_id;
    }
}
