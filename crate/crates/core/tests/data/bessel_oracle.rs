// Generated by gen_bessel_oracle.py (mpmath, 60 digits). Do not edit.
/// (nu, z, J_nu(z), Y_nu(z)) on the acceptance grid.
pub const GRID: &[(f64, f64, f64, f64)] = &[
    (0.0, 0.1, 0.9975015620660400322813, -1.534238651350366844122),
    (0.0, 1.0, 0.7651976865579665514497, 0.08825696421567695798293),
    (0.0, 10.0, -0.2459357644513483351978, 0.05567116728359939142446),
    (0.0, 50.0, 0.05581232766925181500475, -0.09806499547007707902921),
    (0.0, 200.0, -0.01543743993056509159192, -0.0542657752498179106935),
    (0.3, 0.1, 0.4527257459945965855995, -2.001877934799443442654),
    (0.3, 1.0, 0.7402224792810204505291, -0.2457041953564994530177),
    (0.3, 10.0, -0.1946192154569132350452, 0.1604219286479138935387),
    (0.3, 50.0, 0.005310039107847732677504, -0.1127110986498204756163),
    (0.3, 200.0, -0.0383817247511940959693, -0.04135136879259930229521),
    (0.5, 0.1, 0.2518929403260009457268, -2.510527368958509314368),
    (0.5, 1.0, 0.6713967071418030904164, -0.4310988680183760795205),
    (0.5, 10.0, -0.137263735755050481213, 0.211708866331398152919),
    (0.5, 50.0, -0.02960583188892461256803, -0.1088847563505395431367),
    (0.5, 200.0, -0.04927052384285447497559, -0.02748662114718022985503),
    (1.0, 0.1, 0.04993752603624199755634, -6.458951094702026987702),
    (1.0, 1.0, 0.4400505857449335159597, -0.7812128213002887165471),
    (1.0, 10.0, 0.04347274616886143666975, 0.2490154242069538839233),
    (1.0, 50.0, -0.09751182812517513766146, -0.05679566856201476794182),
    (1.0, 200.0, -0.05430453818237822271067, 0.01530182458038998921967),
    (2.7, 0.1, 0.00007357353398361123071267, -1603.65385276814203217),
    (2.7, 1.0, 0.03447121017399908089051, -3.751593896991657232949),
    (2.7, 10.0, 0.1478514677764540911195, -0.2100672124916560942198),
    (2.7, 50.0, 0.05504874748262545025026, 0.09858998517122246227263),
    (2.7, 200.0, 0.05515462946197051380514, 0.01188889607666356235841),
    (5.0, 0.1, 2.603081790964440834025e-9, -24461484.50230391535044),
    (5.0, 1.0, 0.0002497577302112344313751, -260.4058666258122207162),
    (5.0, 10.0, -0.2340615281867936404437, 0.135403047689362303197),
    (5.0, 50.0, -0.08140024769656963964397, -0.07854841391308165338606),
    (5.0, 200.0, -0.05513267894401467761388, 0.01201964083220010752092),
    (10.5, 0.1, 1.834698588003549382251e-21, -16524030146619774377.18),
    (10.5, 1.0, 5.678187477634622299299e-11, -536349976.627599383125),
    (10.5, 10.0, 0.1630073663903257453898, -0.435123468587179080605),
    (10.5, 50.0, -0.08484972094355338142992, 0.07630487814534201298153),
    (10.5, 200.0, 0.03998042474848187636532, 0.03986289179034925197789),
    (30.0, 0.1, 3.510791444621457228648e-72, -3.022221262403021816138e+69),
    (30.0, 1.0, 3.48286979425148290225e-42, -3.048128783225643216155e+39),
    (30.0, 10.0, 1.551096078257467006912e-12, -7256142316.100330641987),
    (30.0, 50.0, 0.04843425724550941748548, -0.1164572349354414477008),
    (30.0, 200.0, -0.05212227902988283204361, -0.02242277551217156335054),
];
/// Off-grid spot values.
pub const EXTRA: &[(f64, f64, f64, f64)] = &[
    (3.7, 25.0, 0.1579139296116469406777, -0.02838265690249803272967),
    (0.0, 1e-8, 0.999999999999999975, -11.8007738771795307683),
    (2.0, 50.0, -0.05971280079425882051121, 0.09579316872759648831154),
    (45.5, 60.0, 0.1227375670354783231291, -0.03447867793746035329333),
    (100.0, 80.0, 0.000004606553064823477354141, -1152.590518569850486363),
    (100.0, 1e4, -0.007976516311393374168021, -0.000200868187651884264011),
    (200.0, 150.0, 8.057702198396853796472e-14, -29864935180.40655422391),
    (200.0, 400.0, -0.01958998386955328338964, -0.03813120389886585526995),
    (0.25, 1e6, 0.00002802776377738799835331, -0.0007973921349155386528904),
    (7.0, 1.9e4, 0.005251060505992650523643, 0.002435707214259571247841),
    (13.0000001, 7.5, 0.001644016919173768404669, -18.30804263958109764783),
    (1e-7, 3.0, -0.2600518957064697428049, 0.3768500508616509639133),
    (60.0, 35.0, 2.412088852894390068232e-10, -27083384.00922288998702),
    (20.0, 20.0, 0.1647477737753265323412, -0.2854894586002034898518),
];
