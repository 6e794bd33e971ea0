/** Payload shapes of the pimproto HTTP API. */

export interface RectPayload {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface ImageRefPayload {
  id: string;
  media_type: string;
  width: number;
  height: number;
  content_hash: string;
}

export interface HotspotPayload {
  id: string;
  name: string;
  rect: RectPayload;
  link_target: string | null;
  s_behaviours: string[];
  created_seq: number;
}

export interface ScreenPayload {
  id: string;
  name: string;
  image: ImageRefPayload | null;
  hotspots: HotspotPayload[];
}

export interface ProjectPayload {
  id: string;
  name: string;
  initial_screen: string | null;
  screens: ScreenPayload[];
  next_auto_ids: Record<string, number>;
}

export interface ProjectSummary {
  id: string;
  name: string;
  screens: number;
}

export interface BehaviourPayload {
  kind: "I" | "S";
  name: string;
  target: string | null;
}

export interface WidgetPayload {
  name: string;
  category: string;
  behaviours: BehaviourPayload[];
}

export interface PimPayload {
  name: string;
  initial: string;
  states: { name: string; widgets: WidgetPayload[] }[];
  transitions: { source: string; target: string; behaviour: string }[];
}

export interface ConversionWarningPayload {
  code: string;
  message: string;
  path: string;
}

export interface ConversionReportPayload {
  pim: PimPayload;
  warnings: ConversionWarningPayload[];
  name_map: {
    states: Record<string, string>;
    widgets: Record<string, [string, string]>;
    behaviours: Record<string, string>;
  };
}

export interface AnalysisPayload {
  reachable: string[];
  unreachable: string[];
  dead_ends: string[];
  dangling_hotspots: [string, string][];
}

export interface TraceEventPayload {
  kind: "Navigate" | "SBehaviour" | "Reset";
  source: string;
  behaviour: string | null;
  result: string;
  hotspot_id: string | null;
  seq: number;
}

export interface SessionHotspotPayload {
  id: string;
  name: string;
  rect: RectPayload;
  linked: boolean;
  s_behaviours: string[];
}

export interface SessionPayload {
  id: string;
  current: string;
  screen_id: string;
  screen_name: string;
  image: string | null;
  hotspots: SessionHotspotPayload[];
  trace: TraceEventPayload[];
}

export interface SessionStepPayload {
  event: TraceEventPayload | null;
  session: SessionPayload;
}

export interface ApiErrorPayload {
  status: number;
  code: string;
  message: string;
  path: string | null;
}
